use proptest::prelude::*;

use combclust::compare::{consensus_partition, ConsensusMode};
use combclust::{Exec, Partition};
use combclust_cli::io::NamedPartition;
use combclust_cli::report::{Outcome, Report, Verb};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn consensus_report_round_trips(
        inputs in prop::collection::vec(prop::collection::vec(0usize..3, 5), 1..4),
        intra in prop::num::f64::NORMAL,
        warn in prop::option::of("[a-z ]{0,12}"),
    ) {
        let ps: Vec<Partition> = inputs.iter().map(|l| Partition::from_assignment(l)).collect();
        let c = consensus_partition(&ps, 1, 5, ConsensusMode::Exhaustive, Exec::Sequential).unwrap();
        let items: Vec<String> = (0..5).map(|i| format!("item-{i}")).collect();
        let mut r = Report::new(Verb::Consensus, items.clone(), Outcome::Empty);
        r.partition = Some(NamedPartition::from_partition(&c.partition, &items));
        r.result = Outcome::Consensus(c);
        r.quality.intra = Some(intra);
        r.warnings.extend(warn);
        let r = r.stamped();
        prop_assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}
