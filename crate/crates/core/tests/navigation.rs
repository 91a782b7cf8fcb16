use std::path::PathBuf;

use sonoform_core::catalogue::builtin_proposed;
use sonoform_core::nav::{boundary_click, render_nav_cue, CueSpec, NavError, NavMove, NavState};
use sonoform_core::sonifier::{element_cue, Audience, RenderProfile};
use sonoform_core::uml::{assign_layout, parse_diagram, ClassModel, ElementRef};

fn library() -> ClassModel {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/library.uml");
    assign_layout(&parse_diagram(&std::fs::read_to_string(path).unwrap()).unwrap())
}

fn script() -> Vec<NavMove> {
    use NavMove::*;
    vec![
        Into,
        NextSibling,
        Into,
        Into,
        FollowRelationship { index: 0 },
        WhereAmI,
        Into,
        NextSibling,
        NextSibling,
        NextSibling,
        Out,
        Out,
        PrevSibling,
        PrevSibling,
        RepeatCue,
        NextSibling,
        FollowRelationship { index: 1 },
        Out,
        Into,
        Out,
    ]
}

fn run(model: &ClassModel) -> Vec<(String, String, bool)> {
    let mut s = NavState::new(model, Audience::Expert).unwrap();
    script()
        .into_iter()
        .map(|mv| {
            let ev = s.navigate(model, mv).unwrap();
            (ev.focus_id, ev.cue_id, ev.boundary)
        })
        .collect()
}

#[test]
fn scripted_session_is_repeatable() {
    let model = library();
    let a = run(&model);
    assert_eq!(a.len(), 20);
    assert_eq!(a, run(&model));
    assert_eq!(a, run(&library()));
    assert!(a.iter().any(|(_, _, b)| *b), "script should touch a boundary");
    assert!(a.iter().any(|(_, c, _)| c.starts_with("cue-")));
}

#[test]
fn starts_on_the_first_declared_package() {
    let model = library();
    let s = NavState::new(&model, Audience::Novice).unwrap();
    assert_eq!(s.focus, ElementRef::Package { index: 0 });
    let flat = parse_diagram("class A; class B").unwrap();
    assert_eq!(NavState::new(&flat, Audience::Novice).unwrap().focus, ElementRef::Classifier { index: 0 });
    assert!(matches!(NavState::new(&ClassModel::empty("x"), Audience::Novice), Err(NavError::EmptyModel)));
}

#[test]
fn into_then_out_restores_every_focus() {
    let model = library();
    for e in model.elements() {
        for audience in [Audience::Novice, Audience::Expert] {
            let mut s = NavState { audience, focus: e, history: vec![e] };
            let down = s.navigate(&model, NavMove::Into).unwrap();
            if down.moved {
                assert_eq!(model.parent(down.focus), Some(e));
                let up = s.navigate(&model, NavMove::Out).unwrap();
                assert_eq!(up.focus, e, "out after into from {e:?}");
            } else {
                assert!(down.boundary);
                assert_eq!(s.focus, e);
            }
        }
    }
}

#[test]
fn boundaries_do_not_move_and_still_sound() {
    let model = library();
    let mut s = NavState::new(&model, Audience::Novice).unwrap();
    let ev = s.navigate(&model, NavMove::NextSibling).unwrap();
    assert!(ev.boundary && !ev.moved);
    assert_eq!(ev.cue, CueSpec::Boundary);
    assert!(ev.caption.starts_with("edge of"));
    let click = render_nav_cue(&model, &builtin_proposed(), &RenderProfile::default(), &ev.cue).unwrap();
    assert_eq!(click, boundary_click(44_100));
    assert!(click.duration_s() < 0.1);
}

#[test]
fn novices_cannot_follow_relationships() {
    let model = library();
    let mut s = NavState::new(&model, Audience::Novice).unwrap();
    let before = s.clone();
    assert!(matches!(s.navigate(&model, NavMove::FollowRelationship { index: 0 }), Err(NavError::Forbidden(_))));
    assert_eq!(s, before);
}

#[test]
fn following_a_dependency_plays_it_then_the_target() {
    let model = assign_layout(&parse_diagram("diagram D\nclass A { attr a; attr b }\nclass B\nA ..> B").unwrap());
    let cat = builtin_proposed();
    let profile = RenderProfile::default();
    let mut s = NavState::new(&model, Audience::Expert).unwrap();
    let into = s.clone().navigate(&model, NavMove::Into).unwrap();
    assert_eq!(into.focus, ElementRef::Attribute { classifier: 0, index: 0 });

    let ev = s.navigate(&model, NavMove::FollowRelationship { index: 0 }).unwrap();
    assert_eq!(ev.focus, ElementRef::Classifier { index: 1 });
    let dep = ElementRef::Relationship { index: 0 };
    assert_eq!(ev.cue, CueSpec::Sequence { elements: vec![dep, ev.focus] });
    let audio = render_nav_cue(&model, &cat, &profile, &ev.cue).unwrap();
    let (first, _) = element_cue(&model, dep, &cat, &profile).unwrap();
    let (second, _) = element_cue(&model, ev.focus, &cat, &profile).unwrap();
    assert_eq!(audio.len(), first.len() + 4410 + second.len());
    assert_eq!(audio.slice(0, first.len()), first);
}

#[test]
fn where_am_i_reports_the_path_without_moving() {
    let model = library();
    let mut s = NavState::new(&model, Audience::Expert).unwrap();
    s.navigate(&model, NavMove::Into).unwrap();
    let before = s.focus;
    let ev = s.navigate(&model, NavMove::WhereAmI).unwrap();
    assert!(!ev.moved);
    assert_eq!(ev.focus, before);
    assert!(ev.caption.contains(" > ") || ev.breadcrumb.len() == 1, "{}", ev.caption);
    assert!(ev.caption.contains("item 1 of"));
    assert_eq!(ev.cue, CueSpec::Element { element: before });
}

#[test]
fn history_only_grows() {
    let model = library();
    let mut s = NavState::new(&model, Audience::Expert).unwrap();
    let mut len = s.history.len();
    for mv in script() {
        s.navigate(&model, mv).unwrap();
        assert!(s.history.len() >= len);
        assert_eq!(*s.history.last().unwrap(), s.focus);
        len = s.history.len();
    }
}

#[test]
fn cue_ids_depend_on_audience() {
    let model = library();
    let spec = CueSpec::Element { element: ElementRef::Classifier { index: 1 } };
    assert_ne!(spec.id(&model, Audience::Novice), spec.id(&model, Audience::Expert));
    assert_eq!(spec.id(&model, Audience::Novice), spec.id(&library(), Audience::Novice));
}
