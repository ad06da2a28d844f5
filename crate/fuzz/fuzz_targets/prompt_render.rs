#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::decoder::{PromptTemplate, TemplateKind, SKELETON_PLACEHOLDER};
use textskel::text::Lang;

fuzz_target!(|data: &[u8]| {
    let skeleton = String::from_utf8_lossy(data);
    for kind in [TemplateKind::Reconstruct, TemplateKind::Summarize] {
        for lang in [Lang::English, Lang::Presegmented] {
            let t = PromptTemplate::builtin(kind, lang);
            let out = t.render(&skeleton, data.len());
            assert!(out.contains(skeleton.as_ref()));
            if !skeleton.contains(SKELETON_PLACEHOLDER) {
                assert!(!out.contains(SKELETON_PLACEHOLDER));
            }
        }
    }
});
