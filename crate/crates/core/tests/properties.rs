use proptest::prelude::*;

use confpres::finmap::{classify, compose, epi_mono_factor, FinMap, MapClass};
use confpres::fsimp::FSimplex;
use confpres::griddiag::{complete_from_corner, CornerData};
use confpres::shufflehorn::{enumerate_shuffles, Shuffle};

fn finmap(src: usize, dst: usize) -> impl Strategy<Value = FinMap> {
    prop::collection::vec(0..dst, src).prop_map(move |img| FinMap::new(src, dst, img).unwrap())
}

fn string(max_card: usize, max_degree: usize) -> impl Strategy<Value = FSimplex> {
    prop::collection::vec(1..=max_card, 1..=max_degree + 1).prop_flat_map(|cards| {
        let maps: Vec<_> = cards.windows(2).map(|w| finmap(w[1], w[0])).collect();
        (Just(cards[0]), maps).prop_map(|(card0, maps)| FSimplex::new(card0, maps).unwrap())
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn relabeling(z: &FSimplex) -> impl Strategy<Value = Vec<Vec<usize>>> {
    z.cards().into_iter().map(permutation).collect::<Vec<_>>()
}

proptest! {
    #[test]
    fn epi_mono_factorization_recomposes(f in (0usize..5, 1usize..5).prop_flat_map(|(s, d)| finmap(s, d))) {
        let (epi, mono) = epi_mono_factor(&f);
        prop_assert!(epi.is_surjective());
        prop_assert!(mono.is_injective());
        prop_assert_eq!(compose(&mono, &epi).unwrap(), f);
    }

    #[test]
    fn composition_is_associative(
        (f, g, h) in (1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(a, b, c, d)| (finmap(a, b), finmap(b, c), finmap(c, d)))
    ) {
        let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn face_identities(z in string(3, 5)) {
        let n = z.degree();
        prop_assume!(n >= 2);
        for j in 1..=n {
            for i in 0..j {
                let a = z.face(j).unwrap().face(i).unwrap();
                let b = z.face(i).unwrap().face(j - 1).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn degeneracy_identities(z in string(3, 4)) {
        let n = z.degree();
        for i in 0..=n {
            let s = z.degeneracy(i).unwrap();
            prop_assert_eq!(&s.face(i).unwrap(), &z);
            prop_assert_eq!(&s.face(i + 1).unwrap(), &z);
            prop_assert!(!s.is_nondegenerate());
            prop_assert_eq!(s.core_simplex(), z.core_simplex());
            for j in i..=n {
                let a = z.degeneracy(j).unwrap().degeneracy(i).unwrap();
                let b = z.degeneracy(i).unwrap().degeneracy(j + 1).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn defect_is_monotone_and_bounded(z in string(4, 5)) {
        let d = z.defect();
        prop_assert!(d >= z.max_card());
        if z.degree() > 0 {
            for i in 0..=z.degree() {
                prop_assert!(z.face(i).unwrap().defect() <= d);
            }
            prop_assert_eq!(z.saturate().unwrap().defect(), d);
        }
    }

    #[test]
    fn canonical_form_ignores_labels((z, perms) in string(4, 4).prop_flat_map(|z| {
        let p = relabeling(&z);
        (Just(z), p)
    })) {
        let w = z.relabel(&perms).unwrap();
        prop_assert_eq!(w.canonicalize(), z.canonicalize());
        prop_assert_eq!(w.defect(), z.defect());
        let c = z.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
    }

    #[test]
    fn saturation_alternates_classes(z in string(3, 4)) {
        prop_assume!(z.degree() > 0);
        let sat = z.saturate().unwrap();
        prop_assert_eq!(sat.degree(), 2 * z.degree());
        for (k, f) in sat.maps().iter().enumerate() {
            let c = classify(f);
            if k % 2 == 0 {
                prop_assert!(c.is_injective());
            } else {
                prop_assert!(c.is_surjective());
            }
        }
    }

    #[test]
    fn shuffle_words_round_trip(r in 0usize..5, s in 0usize..5, pick in any::<prop::sample::Index>()) {
        let all = enumerate_shuffles(r, s);
        let sigma = pick.get(&all);
        let parsed: Shuffle = sigma.to_string().parse().unwrap();
        prop_assert_eq!(&parsed, sigma);
        prop_assert!(Shuffle::minimal(r, s).poset_le(sigma));
        prop_assert!(sigma.poset_le(&Shuffle::maximal(r, s)));
    }

    #[test]
    fn completed_grids_commute(
        (row, column) in (2usize..5).prop_flat_map(|n| (1..n, 1..n).prop_flat_map(move |(m, k)| {
            let inj = finmap(m, n).prop_filter("injection", |f| classify(f) == MapClass::ProperInjective);
            let surj = finmap(n, k).prop_filter("surjection", |f| classify(f) == MapClass::ProperSurjective);
            (inj, surj)
        }))
    ) {
        let corner = row.dst();
        let c = CornerData { row: vec![row], column: vec![column], corner };
        let d = complete_from_corner(&c).unwrap();
        prop_assert_eq!(d.card(0, 1), corner);
        let paths: Vec<FSimplex> = enumerate_shuffles(1, 1)
            .iter()
            .map(|sigma| d.restrict_shuffle(sigma).unwrap().face(1).unwrap())
            .collect();
        prop_assert_eq!(&paths[0], &paths[1]);
        prop_assert_eq!(d.top_simplex(), c.top_simplex());
    }
}
