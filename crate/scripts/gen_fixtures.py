#!/usr/bin/env python3
"""Regenerates the test fixtures under crates/textskel/tests/fixtures.

news200.jsonl  200 synthetic news-style records (<= 512 chars) with entity offsets
freq_en.tsv    word<TAB>zipf for the corpus vocabulary plus common English words

Requires the `wordfreq` package. Output is deterministic for a given wordfreq
release.
"""

import json
import random
import re
from pathlib import Path

from wordfreq import top_n_list, zipf_frequency

OUT = Path(__file__).resolve().parent.parent / "crates" / "textskel" / "tests" / "fixtures"
MAX_LEN = 512
RECORDS = 200
TOP_WORDS = 3000

PEOPLE = [
    "Maria Okafor", "Daniel Whitcombe", "Priya Raman", "Tomasz Zielinski", "Helen Marchetti",
    "Kwame Asante", "Sofia Lindqvist", "Rafael Duarte", "Aiko Tanabe", "Liam Gallagher",
    "Nadia Haddad", "Oliver Brennan", "Grace Mwangi", "Viktor Petrov", "Elena Castillo",
    "Samuel Adeyemi", "Ingrid Halvorsen", "Marcus Feld", "Leila Farahani", "Chen Wei",
]
ORGS = [
    "Northwind Energy", "the Harbor Authority", "Meridian Bank", "the Bureau of Statistics",
    "Crescent Pharmaceuticals", "the City Council", "Atlas Freight", "Bluewater Mining",
    "the National Weather Service", "Kestrel Airlines", "Summit University", "Orion Telecom",
    "the Ministry of Health", "Redline Motors", "the Port of Valmont", "Granite Capital",
]
PLACES = [
    "Valmont", "Eastbridge", "Lake Corrin", "Port Ardent", "the Sable Valley", "Norhaven",
    "Kingsford", "the Tarn Highlands", "Westmere", "Ravenholt", "Brisa Bay", "Old Carrick",
]
MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August",
          "September", "October", "November", "December"]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]

TEMPLATES = [
    "{O} said on {D} that it would cut {N} jobs in {L} as demand for its services slowed.",
    "{P}, a spokesperson for {O}, told reporters the decision was not taken lightly.",
    "Officials in {L} reported {N} new cases over the weekend, up from a week earlier.",
    "Shares of {O} rose {N} percent in early trading after quarterly results beat forecasts.",
    "{P} will step down as chief executive of {O} at the end of {M}, the company announced.",
    "Heavy rain caused flooding across {L} on {D}, closing roads and several schools.",
    "The agreement, signed in {L}, is expected to take effect in {M}.",
    "{P} said the plan would give families in {L} more time to repay their loans.",
    "Critics argue the proposal does little to address rising costs for small businesses.",
    "{O} has faced growing pressure from investors to reduce its debt.",
    "According to {O}, about {N} people were evacuated from homes near {L}.",
    "The new bridge linking {L} and {L2} opened to traffic on {D} after two years of delays.",
    "{P} won the seat with {N} percent of the vote, according to preliminary results.",
    "Police in {L} said they had arrested {N} people following the protest.",
    "The report by {O} found that prices in {L} had climbed for the {N}th straight month.",
    "In a statement, {P} called the ruling a victory for workers across the region.",
    "Negotiators from {O} and {O2} met for more than {N} hours without reaching a deal.",
    "Tickets for the festival in {L} sold out within minutes, organizers said.",
    "{P} is expected to testify before the committee in {M}.",
    "Analysts at {O} said the market would likely remain volatile through the summer.",
    "The museum in {L} will reopen in {M} with an exhibition of local photography.",
    "Engineers warned that the dam near {L} needed urgent repairs.",
    "Residents said they had not been consulted before construction began.",
    "{O} confirmed it had paid a fine of {N} million to settle the case.",
    "Temperatures in {L} are forecast to reach {N} degrees by the end of the week.",
    "{P}, who joined {O} in {Y}, oversaw the expansion into {L}.",
    "The strike disrupted train services between {L} and {L2} for a second day.",
    "A spokesperson for {O} declined to comment on the report.",
    "The council voted {N} to {N2} to approve the new housing project in {L}.",
    "Scientists at {O} said the findings could help farmers prepare for longer droughts.",
]

SLOT = re.compile(r"\{(P|O|O2|L|L2|D|M|N|N2|Y)\}")


def fill(template, rng):
    """Returns (text, [(surface, start, end)]) with offsets relative to the sentence."""
    out, entities, pos = [], [], 0
    picks = {}
    for m in SLOT.finditer(template):
        lit = template[pos:m.start()]
        out.append(lit)
        slot = m.group(1)
        if slot in ("P",):
            value = rng.choice(PEOPLE)
        elif slot in ("O", "O2"):
            value = rng.choice([o for o in ORGS if o != picks.get("O")])
        elif slot in ("L", "L2"):
            value = rng.choice([p for p in PLACES if p != picks.get("L")])
        elif slot == "D":
            value = rng.choice(DAYS)
        elif slot == "M":
            value = rng.choice(MONTHS)
        elif slot == "Y":
            value = str(rng.randint(1995, 2021))
        else:
            value = str(rng.randint(2, 95))
        picks[slot] = value
        start = sum(len(s) for s in out)
        # sentence-initial "the" is capitalised
        if start == 0 and value.startswith("the "):
            value = "The " + value[4:]
        out.append(value)
        if slot in ("P", "O", "O2", "L", "L2"):
            surface = value
            offset = 0
            if surface.lower().startswith("the "):
                surface, offset = surface[4:], 4
            entities.append((surface, start + offset, start + offset + len(surface)))
        pos = m.end()
    out.append(template[pos:])
    return "".join(out), entities


def record(idx, rng):
    text, entities = "", []
    target = rng.randint(330, 500)
    order = rng.sample(range(len(TEMPLATES)), len(TEMPLATES))
    for t in order:
        sentence, ents = fill(TEMPLATES[t], rng)
        sep = " " if text else ""
        if len(text) + len(sep) + len(sentence) > MAX_LEN:
            continue
        base = len(text) + len(sep)
        text += sep + sentence
        entities += [{"surface": s, "start": base + a, "end": base + b} for s, a, b in ents]
        if len(text) >= target:
            break
    for e in entities:
        assert text[e["start"]:e["end"]] == e["surface"]
    return {"id": f"news-{idx:03d}", "text": text, "lang": "english", "entities": entities}


def main():
    rng = random.Random(20240611)
    OUT.mkdir(parents=True, exist_ok=True)
    records = [record(i, rng) for i in range(RECORDS)]
    with open(OUT / "news200.jsonl", "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")

    vocab = set(top_n_list("en", TOP_WORDS))
    for r in records:
        vocab.update(w.lower() for w in re.findall(r"[A-Za-z]+(?:'[A-Za-z]+)?", r["text"]))
    rows = []
    for w in sorted(vocab):
        z = zipf_frequency(w, "en")
        if z > 0:
            rows.append(f"{w}\t{z:.2f}")
    (OUT / "freq_en.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"{len(records)} records, {len(rows)} frequency rows")


if __name__ == "__main__":
    main()
