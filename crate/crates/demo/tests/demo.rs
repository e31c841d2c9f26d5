use peres_demo::{face_section_json, find_extreme_json, state_section_json, test_extreme_json};

#[test]
fn tiles_state_reports_extreme() {
    let v = test_extreme_json("upb-tiles").unwrap();
    assert_eq!(v["verdict"], "extreme");
    assert_eq!(v["ppt"], true);
    assert_eq!((v["n"].as_u64(), v["m"].as_u64()), (Some(4), Some(4)));
}

#[test]
fn matrix_json_is_accepted() {
    let file = r#"{"dims":[1,2],"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]}"#;
    let v = test_extreme_json(file).unwrap();
    assert_eq!(v["b_rank"], 4);
    assert!(test_extreme_json("{not json").is_err());
    assert!(test_extreme_json("nope").is_err());
}

#[test]
fn search_ends_at_an_extreme_point() {
    let v = find_extreme_json("3x3", 7).unwrap();
    assert_eq!(v["report"]["verdict"], "extreme");
    let pairs = v["rank_pairs"].as_array().unwrap();
    assert_eq!(pairs[0], serde_json::json!([9, 9]));
    assert!(find_extreme_json("3", 0).is_err());
}

#[test]
fn state_section_shape() {
    let v = state_section_json("mixed:3x3", 1, 11).unwrap();
    assert_eq!(v["region"].as_array().unwrap().len(), 121);
    assert_eq!(v["level"].as_array().unwrap().len(), 121);
    let regions: Vec<u64> = v["region"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_u64().unwrap())
        .collect();
    assert_eq!(regions[60], 1);
    assert!(state_section_json("mixed:2x2", 0, 1).is_err());
}

#[test]
fn face_section_has_extreme_boundary() {
    let v = face_section_json("3x3", 7, 9, 36).unwrap();
    assert_eq!(v["region"].as_array().unwrap().len(), 81);
    let boundary = v["boundary"].as_array().unwrap();
    assert_eq!(boundary.len(), 36);
    let face = &v["face"];
    assert!(face["b_rank"].as_u64().unwrap() >= 3);
    assert!(boundary
        .iter()
        .all(|b| b["n"].as_u64() <= face["n"].as_u64()));
}
