mod common;

use common::{distribution, small_world};
use proptest::prelude::*;
use rbd_core::describe::{
    build_extended_description, build_flat_description, decode_exact, decode_max_likelihood,
    enumerate_intermediate_graphs, random_order, SharedContext, Vocabulary,
};
use rbd_core::graph::{
    generate_er_labeled, parse_graph, perturb_view, reduce_multigraph, write_graph, ChannelNoiseModel, DirectedArc,
    LabelAlphabet, WorldGraph,
};
use rbd_core::info::{
    conditional_entropy, empirical_label_entropy, joint_stats, joint_stats_of, mutual_information, Conditioning,
    JointLabelStats,
};
use rbd_core::protocol::{
    coder, decode_message, decode_wire, encode_message, FrequencyTable, Message, NodeRef, Triple,
};

fn context_from(world: &WorldGraph, k: usize, seed: u64) -> SharedContext {
    let mut order = random_order(world.n(), seed);
    order.truncate(k.min(world.n()));
    SharedContext::new(order, world.n()).unwrap()
}

fn permuted(world: &WorldGraph, perm: &[usize]) -> WorldGraph {
    WorldGraph::from_arcs(
        world.n(),
        world.alphabet().clone(),
        world.arcs().map(|(i, j, l)| (perm[i], perm[j], l)),
    )
    .unwrap()
}

fn message_strategy() -> impl Strategy<Value = (usize, usize, usize, Message)> {
    (4usize..5000)
        .prop_flat_map(|n| (Just(n), 1..12.min(n), 2usize..40))
        .prop_flat_map(|(n, k, m_voc)| {
            let symbol = 0..m_voc as u16;
            let node_ref = prop_oneof![
                (0..n).prop_map(NodeRef::SharedName),
                (1..=k).prop_flat_map(move |len| {
                    (prop::collection::vec(symbol.clone(), len), 0..=k - len).prop_flat_map(move |(syms, ext)| {
                        prop::collection::vec(0..m_voc as u16, ext).prop_map(move |e| NodeRef::Described {
                            base: rbd_core::describe::Description::new(syms.clone()),
                            extension: rbd_core::describe::Description::new(e),
                        })
                    })
                }),
            ];
            let triple = (node_ref.clone(), 1..m_voc as u16, node_ref).prop_map(|(a, l, b)| Triple::new(a, l, b));
            prop::collection::vec(triple, 1..6).prop_map(move |t| (n, k, m_voc, Message::new(t)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trip_decode(world in small_world(40), k in 0usize..12, seed in any::<u64>(), depth in 0usize..=2) {
        let ctx = context_from(&world, k, seed);
        for x in (0..world.n()).filter(|&x| !ctx.contains(x)) {
            let d = build_extended_description(&world, x, &ctx, depth).unwrap();
            let found = decode_exact(&world, &d, &ctx, depth).unwrap();
            prop_assert!(found.contains(&x));
        }
    }

    #[test]
    fn codec_round_trip((n, k, m_voc, msg) in message_strategy(), seed in any::<u64>()) {
        let ctx = SharedContext::new(random_order(n, seed).into_iter().take(k).collect(), n).unwrap();
        let (bytes, stats) = encode_message(&msg, n, &ctx, m_voc).unwrap();
        let (header, back) = decode_wire(&bytes).unwrap();
        prop_assert_eq!(&back, &msg);
        prop_assert_eq!((header.n, header.m_voc, header.k), (n, m_voc, k));
        prop_assert_eq!(stats.wire_bytes, bytes.len());
        prop_assert_eq!(encode_message(&msg, n, &ctx, m_voc).unwrap().0, bytes);
    }

    #[test]
    fn mutual_information_bounds(counts in prop::collection::vec(0u64..50, 9), size in 2usize..=3) {
        let stats = JointLabelStats::from_counts(size, counts[..size * size].to_vec()).unwrap();
        prop_assume!(stats.total() > 0);
        let mi: f64 = mutual_information(&stats);
        let hs: f64 = stats.sender_entropy();
        let hr: f64 = stats.receiver_entropy();
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= hs.min(hr) + 1e-12);
        let a = hs - conditional_entropy::<f64>(&stats, Conditioning::SenderGivenReceiver);
        let b = hr - conditional_entropy::<f64>(&stats, Conditioning::ReceiverGivenSender);
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn determinism_under_seed(n in 4usize..48, m in 1usize..=3, w in prop::collection::vec(0u32..8, 4), seed in any::<u64>(), eps in 0.0f64..0.4) {
        let dist = distribution(m, &w);
        let a = generate_er_labeled(n, &dist, seed).unwrap();
        let b = generate_er_labeled(n, &dist, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let ch = ChannelNoiseModel::symmetric(dist.alphabet().len(), eps).unwrap();
        let p = perturb_view(&a, &ch, seed ^ 1).unwrap();
        let q = perturb_view(&b, &ch, seed ^ 1).unwrap();
        prop_assert_eq!(p.receiver(), q.receiver());
        prop_assert_eq!(random_order(n, seed), random_order(n, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generators_and_views_are_symmetric(world in small_world(32), eps in 0.0f64..1.0, seed in any::<u64>()) {
        prop_assert!(world.check_invariants());
        let size = world.alphabet().len();
        let eps = eps * (size - 1) as f64 / size as f64;
        let pair = perturb_view(&world, &ChannelNoiseModel::symmetric(size, eps).unwrap(), seed).unwrap();
        prop_assert!(pair.receiver().check_invariants());
        let same = perturb_view(&world, &ChannelNoiseModel::identity(size), seed).unwrap();
        prop_assert!(same.receiver().cells().eq(world.cells()));
    }

    #[test]
    fn identity_channel_information_is_entropy(world in small_world(32), seed in any::<u64>()) {
        let pair = perturb_view(&world, &ChannelNoiseModel::identity(world.alphabet().len()), seed).unwrap();
        let mi: f64 = mutual_information(&joint_stats(&pair).unwrap());
        prop_assert_eq!(mi, empirical_label_entropy::<f64>(&world));
    }

    #[test]
    fn graph_text_round_trip(world in small_world(24)) {
        prop_assert_eq!(parse_graph(&write_graph(&world)).unwrap(), world);
    }

    #[test]
    fn multigraph_reduction_round_trip(
        n in 2usize..8,
        m in 1usize..=4,
        raw in prop::collection::btree_set((0usize..8, 0usize..8, 1u16..=4), 0..20),
    ) {
        let alphabet = LabelAlphabet::with_labels(m).unwrap();
        let arcs: std::collections::BTreeSet<DirectedArc> = raw
            .into_iter()
            .filter(|&(a, b, l)| a < n && b < n && a != b && (l as usize) <= m)
            .map(|(from, to, label)| DirectedArc { label, from, to })
            .collect();
        let list: Vec<DirectedArc> = arcs.iter().copied().collect();
        let reduced = reduce_multigraph(n, &alphabet, &list).unwrap();
        prop_assert!(reduced.world.check_invariants());
        prop_assert_eq!(reduced.expand(), arcs);
    }

    #[test]
    fn extended_refines_flat(world in small_world(24), k in 0usize..8, seed in any::<u64>(), depth in 1usize..=3) {
        let ctx = context_from(&world, k, seed);
        for x in (0..world.n()).filter(|&x| !ctx.contains(x)) {
            let flat = decode_exact(&world, &build_flat_description(&world, x, &ctx).unwrap(), &ctx, 0).unwrap();
            let ext = decode_exact(&world, &build_extended_description(&world, x, &ctx, depth).unwrap(), &ctx, depth).unwrap();
            prop_assert!(ext.contains(&x));
            prop_assert!(ext.iter().all(|v| flat.contains(v)));
        }
    }

    #[test]
    fn noiseless_ml_agrees_with_exact(world in small_world(24), k in 1usize..8, seed in any::<u64>(), depth in 0usize..=1) {
        let ctx = context_from(&world, k, seed);
        let stats = if depth == 0 {
            joint_stats_of(&world, &world).unwrap()
        } else {
            let r = rbd_core::describe::rewrite_adjacency_for_depth(&world, depth).unwrap().0;
            joint_stats_of(&r, &r).unwrap()
        };
        for x in (0..world.n()).filter(|&x| !ctx.contains(x)) {
            let d = build_extended_description(&world, x, &ctx, depth).unwrap();
            let exact = decode_exact(&world, &d, &ctx, depth).unwrap();
            let ml = decode_max_likelihood(&world, &d, &ctx, depth, &stats).unwrap();
            if exact.len() == 1 {
                prop_assert_eq!(ml.node, x);
                prop_assert!(!ml.ambiguous);
            } else {
                prop_assert!(ml.ambiguous);
            }
        }
    }

    #[test]
    fn canonical_codes_survive_relabeling(world in small_world(9), perm_seed in any::<u64>(), x in 0usize..9, s in 0usize..9, d in 1usize..=3) {
        let n = world.n();
        let (x, s) = (x % n, s % n);
        prop_assume!(x != s);
        let perm = random_order(n, perm_seed);
        let moved = permuted(&world, &perm);
        prop_assert_eq!(
            enumerate_intermediate_graphs(&world, x, s, d).unwrap(),
            enumerate_intermediate_graphs(&moved, perm[x], perm[s], d).unwrap()
        );
        let ctx = context_from(&world, 3, perm_seed);
        let moved_ctx = SharedContext::new(ctx.nodes().iter().map(|&v| perm[v]).collect(), n).unwrap();
        prop_assert_eq!(
            build_extended_description(&world, x, &ctx, d).unwrap(),
            build_extended_description(&moved, perm[x], &moved_ctx, d).unwrap()
        );
    }

    #[test]
    fn first_code_is_the_slot_symbol(world in small_world(10), x in 0usize..10, s in 0usize..10, d in 1usize..=3) {
        let n = world.n();
        let (x, s) = (x % n, s % n);
        prop_assume!(x != s && world.get(x, s) == 0);
        let ctx = SharedContext::new(vec![s], n).unwrap();
        let slot = build_extended_description(&world, x, &ctx, d).unwrap().symbols[0];
        let codes = enumerate_intermediate_graphs(&world, x, s, d).unwrap();
        prop_assert_eq!(slot, codes.first().map_or(0, |c| c.rank));
        let vocab = Vocabulary::new(world.alphabet(), d).unwrap();
        for c in &codes {
            prop_assert_eq!(vocab.code(c.rank), Some(c.clone()));
        }
    }

    #[test]
    fn arithmetic_coder_round_trip(freqs in prop::collection::vec(0u64..1000, 1..40), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..200)) {
        prop_assume!(freqs.iter().any(|&f| f > 0));
        let table = FrequencyTable::from_counts(&freqs);
        let live: Vec<usize> = (0..freqs.len()).filter(|&i| freqs[i] > 0).collect();
        let symbols: Vec<usize> = picks.iter().map(|p| live[p.index(live.len())]).collect();
        let (bytes, bits) = coder::encode(&symbols, &table).unwrap();
        prop_assert!(bits <= 8 * bytes.len() as u64);
        prop_assert_eq!(coder::decode(&bytes, symbols.len(), &table).unwrap(), symbols);
    }

    #[test]
    fn truncated_wire_is_rejected((n, k, m_voc, msg) in message_strategy(), cut in any::<prop::sample::Index>()) {
        let ctx = SharedContext::new((0..k).collect(), n).unwrap();
        let (bytes, _) = encode_message(&msg, n, &ctx, m_voc).unwrap();
        let cut = cut.index(bytes.len());
        if let Ok(m) = decode_message(&bytes[..cut]) {
            prop_assert!(false, "prefix of {} bytes decoded to {:?}", cut, m);
        }
    }
}
