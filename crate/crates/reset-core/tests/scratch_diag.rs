use reset_core::learn::reduction::{fit_reduction, flow_descriptor, predict_primitive};
use reset_core::{gen_play, PrimitiveClass, Theta};

#[test]
#[ignore]
fn diag_confusion() {
    let play = gen_play(300, 707, Theta::default());
    let (train, test) = play.split_at(240);
    let model = fit_reduction(train, 1.0, 10.0).unwrap();
    let mut confusion = [[0usize; 3]; 3];
    for rec in test {
        let predicted = predict_primitive(&model, &rec.flow, &rec.pre_observation);
        confusion[rec.primitive.class.index()][predicted.class.index()] += 1;
        if predicted.class != rec.primitive.class {
            let d = flow_descriptor(&rec.flow);
            println!(
                "true={:?} pred={:?} desc: disp=({:.3},{:.3}) cos={:.4} sin={:.4} path={:.4} active={:.3}",
                rec.primitive.class, predicted.class, d[4], d[5], d[6], d[7], d[8], d[9]
            );
        }
    }
    println!("confusion (rows=true pick/push/rot): {confusion:?}");
    // Also show descriptor stats per class.
    for class in PrimitiveClass::ALL {
        let mut act = Vec::new();
        let mut cos = Vec::new();
        for rec in train.iter().filter(|r| r.primitive.class == class) {
            let d = flow_descriptor(&rec.flow);
            act.push(d[9]);
            cos.push(d[6]);
        }
        act.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{:?}: n={} active=[{:.3},{:.3}] cos=[{:.4},{:.4}]",
            class,
            act.len(),
            act.first().unwrap(),
            act.last().unwrap(),
            cos.first().unwrap(),
            cos.last().unwrap()
        );
    }
}
