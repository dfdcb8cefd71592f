//! Small worked examples used by tests, benches and the README.

use crate::dfg::{discover_dfg, Dfg, DfgBuilder, VertexLabel, END, START};
use crate::event_log::{parse_log, Activity, EventLog, LogConfig};

/// Five students attending classes of two courses. Cases 1 and 2 see
/// `bmgc lecture_2` and `bmgc seminar_1` in opposite orders.
pub const LMS_CSV: &str = "\
case_id,timestamp,activity
4,04.09.2023,calc class_1
5,04.09.2023,calc class_1
1,06.09.2023,bmgc lecture_1
3,06.09.2023,bmgc lecture_1
2,06.09.2023,bmgc lecture_1
4,06.09.2023,bmgc lecture_1
5,06.09.2023,bmgc lecture_1
2,08.09.2023,bmgc seminar_1
4,08.09.2023,bmgc seminar_1
5,08.09.2023,bmgc seminar_1
4,11.09.2023,calc class_2
5,11.09.2023,calc class_2
1,13.09.2023,bmgc lecture_2
1,13.09.2023,bmgc seminar_1
3,13.09.2023,bmgc lecture_2
3,13.09.2023,bmgc seminar_1
2,13.09.2023,bmgc lecture_2
1,15.09.2023,calc class_1
2,15.09.2023,calc class_1
3,15.09.2023,calc class_1
";

pub fn lms_log() -> EventLog {
    parse_log(LMS_CSV.as_bytes(), &LogConfig::default()).expect("fixture parses")
}

/// Two orders of an otherwise identical process; only C and D swap.
pub fn two_order_log() -> EventLog {
    EventLog::from_sequences(&[&["A", "B", "C", "D", "E", "F"], &["A", "B", "D", "C", "E", "F"]]).expect("fixture")
}

/// Source logs of the two models sharing the subgraphs {A,B,C}, {F,G,H} and
/// {J,K}. {F,G,H} precedes {A,B,C} and follows {J,K} in the second model
/// only through F.
pub fn worked_logs() -> (EventLog, EventLog) {
    let l1 = EventLog::from_sequences(&[
        &["A", "B", "C", "D", "G", "H"],
        &["F", "G", "H"],
        &["F", "I", "J", "K"],
    ])
    .expect("fixture");
    let l2 = EventLog::from_sequences(&[&["J", "K", "F", "A", "B", "C", "E"], &["J", "K", "F", "G", "H"]])
        .expect("fixture");
    (l1, l2)
}

pub fn worked_models() -> (Dfg, Dfg) {
    let (l1, l2) = worked_logs();
    (discover_dfg(&l1).expect("fixture"), discover_dfg(&l2).expect("fixture"))
}

/// A model where K, L, N and P appear twice, and a duplicate-free model
/// sharing A..F with it. The second model's K..P chain lines up with the
/// first copies.
pub fn duplicate_models() -> (Dfg, Dfg) {
    let act = |s: &str| Activity::new(s).expect("fixture");
    let mut b = DfgBuilder::new();
    let id = |b: &mut DfgBuilder, name: &str, ord: u32| b.add_vertex(VertexLabel::indexed(act(name), ord));
    let core: Vec<usize> = ["A", "B", "C", "D", "E", "F"].iter().map(|n| id(&mut b, n, 0)).collect();
    let first: Vec<usize> = ["K", "L", "N", "P"].iter().map(|n| id(&mut b, n, 1)).collect();
    let second: Vec<usize> = ["K", "L", "N", "P"].iter().map(|n| id(&mut b, n, 2)).collect();
    let chain = |b: &mut DfgBuilder, vs: &[usize]| {
        for w in vs.windows(2) {
            b.add_arc(w[0], w[1], 1);
        }
    };
    let mut main = vec![START];
    main.extend(&first);
    main.extend(&core);
    main.push(END);
    chain(&mut b, &main);
    let mut side = vec![core[0]];
    side.extend(&second);
    side.push(core[5]);
    chain(&mut b, &side);
    let m1 = b.build().expect("fixture").0;

    let l2 = EventLog::from_sequences(&[&["X", "K", "L", "N", "P", "A", "B", "C", "D", "E", "F"]]).expect("fixture");
    (m1, discover_dfg(&l2).expect("fixture"))
}
