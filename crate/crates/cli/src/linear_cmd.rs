use anyhow::bail;
use matchscope_core::exec::RunManifest;
use matchscope_core::field::{AnyTower, Field, Subspace, Tower};
use matchscope_core::linear::{
    find_matched_basis, is_matched_basis, is_matched_subspace, is_matched_subspace_sampled, is_strong_matching,
    is_strong_matching_sampled, random_invertible, strong_matching_exists, BasisSeq, LinearMap,
    MatchedBasisCertificate, StrongCheck, THEOREM_STRONG,
};
use matchscope_core::{with_tower, WitnessCertificate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::envelope::{emit, Execution};
use crate::{Ctx, SubspaceArgs};

struct LinearPair<F: Field> {
    a_gens: Vec<Vec<F::Elem>>,
    a: Subspace<F>,
    b: Subspace<F>,
    multiplier: Option<String>,
}

/// Parses `A` and `B`. Over `K(t)` the generators of `A` may be rational
/// functions; they are multiplied by the lcm of their denominators, which
/// changes neither question asked about the pair.
fn load<F: Field>(t: &Tower<F>, args: &SubspaceArgs) -> anyhow::Result<LinearPair<F>> {
    let (a_gens, m) = if t.is_finite_extension() { (t.parse_list(&args.a)?, t.one()) } else { t.parse_generators(&args.a)? };
    let b_gens = t.parse_list(&args.b)?;
    let a = t.span(&a_gens)?;
    let b = t.span(&b_gens)?;
    if a.dim() == 0 || b.dim() == 0 {
        bail!("A and B must be non-zero subspaces");
    }
    if a.dim() != b.dim() {
        bail!("dim A = {} but dim B = {}", a.dim(), b.dim());
    }
    let multiplier = (m != t.one()).then(|| t.format_element(&m));
    Ok(LinearPair { a_gens, a, b, multiplier })
}

fn strings<F: Field>(t: &Tower<F>, vs: &[Vec<F::Elem>]) -> Vec<String> {
    vs.iter().map(|v| t.format_element(v)).collect()
}

fn matrix<F: Field>(k: &F, m: &[Vec<F::Elem>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| k.format_scalar(x)).collect()).collect()
}

fn manifest(command: &str, tower: &str, args: &SubspaceArgs, extra: serde_json::Value) -> RunManifest {
    let mut params = json!({ "tower": tower, "a": args.a, "b": args.b });
    if let (Some(p), Some(e)) = (params.as_object_mut(), extra.as_object()) {
        p.extend(e.clone());
    }
    RunManifest::new(command, params, None)
}

#[derive(Serialize)]
struct MapResult {
    /// Row `i`: coordinates of the image of the `i`-th echelon basis vector of `A`.
    matrix: Vec<Vec<String>>,
    images: Vec<String>,
    strong: bool,
    exhaustive: bool,
    bases_checked: usize,
    failing_basis: Option<Vec<String>>,
}

#[derive(Serialize)]
struct StrongReport {
    tower: String,
    a: Vec<String>,
    b: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_multiplier: Option<String>,
    dim: usize,
    product: Vec<String>,
    product_meets_a_in: usize,
    strong_matching_exists: bool,
    maps: Vec<MapResult>,
    maps_strong: usize,
    maps_not_strong: usize,
    /// `agrees`, `disagrees`, or `inconclusive` when only sampled checks back
    /// a prediction that no strong matching exists.
    agreement: String,
    discrepancies: Vec<WitnessCertificate>,
}

fn map_result<F: Field>(t: &Tower<F>, f: &LinearMap<F>, c: StrongCheck<F>) -> MapResult {
    let k = t.base();
    let images = f.domain().rows().iter().map(|r| f.apply(k, r).expect("row of the domain")).collect::<Vec<_>>();
    MapResult {
        matrix: matrix(k, f.matrix()),
        images: strings(t, &images),
        strong: c.strong,
        exhaustive: c.exhaustive,
        bases_checked: c.bases_checked,
        failing_basis: c.failing_basis.map(|b| strings(t, b.elems())),
    }
}

pub(crate) fn strong_check(
    ctx: &Ctx,
    args: &SubspaceArgs,
    map: Option<&str>,
    isomorphisms: usize,
    bases: usize,
) -> anyhow::Result<i32> {
    let any = AnyTower::parse(&args.tower)?;
    let desc = any.descriptor();
    let seed = ctx.global.seed;
    let (report, summary) = with_tower!(any, t => strong_inner(&t, args, map, isomorphisms, bases, seed)?);
    let extra = json!({ "map": map, "isomorphisms": isomorphisms, "bases": bases, "seed": seed });
    let mut m = manifest("linear strong-check", &desc, args, extra);
    m.seed = Some(seed);
    let n = report.discrepancies.len();
    emit(ctx, m, Execution::default(), report, n, &summary)
}

fn strong_inner<F: Field>(
    t: &Tower<F>,
    args: &SubspaceArgs,
    map: Option<&str>,
    isomorphisms: usize,
    bases: usize,
    seed: u64,
) -> anyhow::Result<(StrongReport, Vec<String>)> {
    let k = t.base();
    let p = load(t, args)?;
    let exists = strong_matching_exists(t, &p.a, &p.b)?;
    let product = t.product(&p.a, &p.b)?;
    let meet = product.intersect(k, &p.a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let maps: Vec<LinearMap<F>> = match map {
        Some(m) => {
            let basis = BasisSeq::new(t, p.a_gens.clone())?;
            let images = t.parse_list(m)?;
            vec![LinearMap::from_basis_images(t, &basis, &p.b, &images)?]
        }
        None => (0..isomorphisms)
            .map(|_| LinearMap::from_matrix(&p.a, &p.b, random_invertible(k, p.a.dim(), &mut rng)))
            .collect::<Result<_, _>>()?,
    };
    let finite = k.characteristic() > 0;
    let mut results = Vec::new();
    for f in &maps {
        let c = if finite { is_strong_matching(t, f)? } else { is_strong_matching_sampled(t, f, bases, &mut rng)? };
        results.push(map_result(t, f, c));
    }
    let strong = results.iter().filter(|r| r.strong).count();
    let not_strong = results.len() - strong;
    let mut discrepancies = Vec::new();
    let agreement = if exists && not_strong > 0 {
        discrepancies.push(WitnessCertificate::discrepancy(
            THEOREM_STRONG,
            &format!(
                "AB ∩ A = {{0}} for A = {:?}, B = {:?}, yet {not_strong} tested isomorphism(s) have a basis of A not matched to its image",
                strings(t, p.a.rows()),
                strings(t, p.b.rows())
            ),
            None,
        ));
        "disagrees"
    } else if !exists && results.iter().any(|r| r.strong && r.exhaustive) {
        discrepancies.push(WitnessCertificate::discrepancy(
            THEOREM_STRONG,
            &format!(
                "AB ∩ A ≠ {{0}} for A = {:?}, B = {:?}, yet an isomorphism passed the exhaustive strong-matching check",
                strings(t, p.a.rows()),
                strings(t, p.b.rows())
            ),
            None,
        ));
        "disagrees"
    } else if !exists && strong > 0 {
        "inconclusive"
    } else {
        "agrees"
    };
    let summary = vec![
        format!("AB ∩ A = {{0}}: {exists}"),
        format!("{strong} of {} tested isomorphism(s) are strong matchings ({agreement})", results.len()),
    ];
    let report = StrongReport {
        tower: t.descriptor(),
        a: strings(t, p.a.rows()),
        b: strings(t, p.b.rows()),
        a_multiplier: p.multiplier,
        dim: p.a.dim(),
        product: strings(t, product.rows()),
        product_meets_a_in: meet.dim(),
        strong_matching_exists: exists,
        maps: results,
        maps_strong: strong,
        maps_not_strong: not_strong,
        agreement: agreement.to_string(),
        discrepancies,
    };
    Ok((report, summary))
}

#[derive(Serialize)]
struct Violation {
    basis_a: Vec<String>,
    indices: Vec<usize>,
    span_dim: usize,
}

#[derive(Serialize)]
struct MatchedReport {
    tower: String,
    a: Vec<String>,
    b: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_multiplier: Option<String>,
    dim: usize,
    one_in_b: bool,
    /// For a given basis: whether some basis of `B` is matched to it.
    /// Otherwise: whether `A` is matched to `B`.
    matched: bool,
    exhaustive: bool,
    bases_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    matched_basis: Option<MatchedBasisCertificate>,
    violation: Option<Violation>,
    certificate: Option<WitnessCertificate>,
}

pub(crate) fn matched_check(ctx: &Ctx, args: &SubspaceArgs, basis_a: Option<&str>, samples: usize) -> anyhow::Result<i32> {
    let any = AnyTower::parse(&args.tower)?;
    let desc = any.descriptor();
    let seed = ctx.global.seed;
    let (report, summary) = with_tower!(any, t => matched_inner(&t, args, basis_a, samples, seed)?);
    let extra = json!({ "basis_a": basis_a, "samples": samples, "seed": seed });
    let mut m = manifest("linear matched-check", &desc, args, extra);
    m.seed = Some(seed);
    emit(ctx, m, Execution::default(), report, 0, &summary)
}

fn matched_inner<F: Field>(
    t: &Tower<F>,
    args: &SubspaceArgs,
    basis_a: Option<&str>,
    samples: usize,
    seed: u64,
) -> anyhow::Result<(MatchedReport, Vec<String>)> {
    let k = t.base();
    let p = load(t, args)?;
    let one_in_b = p.b.contains(k, &t.one())?;
    let (matched, exhaustive, bases_checked, matched_basis, witness) = match basis_a {
        Some(s) => {
            let ba = BasisSeq::of(t, t.parse_list(s)?, &p.a)?;
            match find_matched_basis(t, &ba, &p.b)? {
                Ok(bb) => (true, true, 1, Some(is_matched_basis(t, &ba, &bb)?.1), None),
                Err(v) => (false, true, 1, None, Some((ba, v))),
            }
        }
        None => {
            let r = if k.characteristic() > 0 {
                is_matched_subspace(t, &p.a, &p.b)?
            } else {
                is_matched_subspace_sampled(t, &p.a, &p.b, samples, &mut ChaCha8Rng::seed_from_u64(seed))?
            };
            (r.matched, r.exhaustive, r.bases_checked, None, r.witness)
        }
    };
    let a = strings(t, p.a.rows());
    let b = strings(t, p.b.rows());
    let violation = witness.map(|(ba, v)| Violation { basis_a: strings(t, ba.elems()), indices: v.indices, span_dim: v.span_dim });
    let certificate = violation.as_ref().map(|v| WitnessCertificate::LinearUnmatched {
        tower: t.descriptor(),
        a: a.clone(),
        b: b.clone(),
        basis_a: v.basis_a.clone(),
        violating_indices: v.indices.clone(),
    });
    let what = if basis_a.is_some() { "the given basis has a matched basis" } else { "A is matched to B" };
    let summary = vec![match (matched, exhaustive) {
        (true, true) => format!("{what}: yes"),
        (true, false) => format!("{what}: no failure among {bases_checked} sampled bases (not exhaustive)"),
        (false, _) => format!("{what}: no"),
    }];
    let report = MatchedReport {
        tower: t.descriptor(),
        a,
        b,
        a_multiplier: p.multiplier,
        dim: p.a.dim(),
        one_in_b,
        matched,
        exhaustive,
        bases_checked,
        matched_basis,
        violation,
        certificate,
    };
    Ok((report, summary))
}
