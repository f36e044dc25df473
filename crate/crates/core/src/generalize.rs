//! Generalization of concrete candidates: repetition, removal and simplicity.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dsl::{Body, Element, Transformation, Unit};
use crate::Pool;

/// How simple a transformation is; smaller is simpler.
///
/// Counted on the written form: group members count once regardless of the
/// repetition factor. Parameters per unit are literal 1, substr 2, split 2,
/// splitSubstr 4, plus one for a repetition factor and one for a removal flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplicityScore {
    pub unit_count: usize,
    pub param_count: usize,
}

impl SimplicityScore {
    pub fn of_element(e: &Element) -> Self {
        let units = e.units();
        let param_count = units.iter().map(Unit::param_count).sum::<usize>()
            + usize::from(e.repetition > 1)
            + usize::from(e.optional);
        SimplicityScore { unit_count: units.len(), param_count }
    }

    fn add(self, other: Self) -> Self {
        SimplicityScore {
            unit_count: self.unit_count + other.unit_count,
            param_count: self.param_count + other.param_count,
        }
    }
}

pub fn simplicity(t: &Transformation) -> SimplicityScore {
    t.elements()
        .iter()
        .map(SimplicityScore::of_element)
        .fold(SimplicityScore { unit_count: 0, param_count: 0 }, SimplicityScore::add)
}

/// Total order: fewer units, then fewer parameters, then rendering.
pub fn simplicity_order(a: &Transformation, b: &Transformation) -> Ordering {
    simplicity(a).cmp(&simplicity(b)).then_with(|| a.as_str().cmp(b.as_str()))
}

fn plain_unit(e: &Element) -> Option<&Unit> {
    match &e.body {
        Body::Unit(u) if e.is_plain() => Some(u),
        _ => None,
    }
}

/// Adds repetition-generalized candidates found by structural evidence.
///
/// For each candidate `B` holding a run of plain elements `G` immediately
/// followed by a copy of `G` whose token indices are shifted by one, if `B`
/// without the copy is also in the pool, the run is folded into a single
/// element (a group when `G` has several units) with factor `r_max`.
/// Originals are kept. `r_max <= 1` returns the pool unchanged.
pub fn induce_repetition(pool: &Pool, r_max: u32) -> Pool {
    let mut out = pool.clone();
    out.extend(repetition_additions(pool, r_max));
    out
}

/// The candidates `induce_repetition` would add, possibly with duplicates.
pub(crate) fn repetition_additions(pool: &Pool, r_max: u32) -> Vec<Transformation> {
    let mut out = Vec::new();
    if r_max < 2 {
        return out;
    }
    for b in pool {
        let es = b.elements();
        let n = es.len();
        for start in 0..n {
            for len in 1..=(n - start) / 2 {
                let run = &es[start..start + len];
                let copy = &es[start + len..start + 2 * len];
                let Some(run_units) = run.iter().map(plain_unit).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                if !run_units.iter().any(|u| u.is_shiftable()) {
                    continue;
                }
                let shifted_copy = copy
                    .iter()
                    .zip(&run_units)
                    .all(|(c, u)| plain_unit(c) == Some(&u.shifted(1)));
                if !shifted_copy {
                    continue;
                }
                let mut single = es[..start + len].to_vec();
                single.extend_from_slice(&es[start + 2 * len..]);
                if !Transformation::new(single).is_ok_and(|a| pool.contains(&a)) {
                    continue;
                }
                let units: Vec<Unit> = run_units.into_iter().cloned().collect();
                let folded = if units.len() == 1 {
                    Element::unit(units.into_iter().next().unwrap())
                } else {
                    Element::group(units)
                };
                let mut merged = es[..start].to_vec();
                merged.push(folded.repeated(r_max));
                merged.extend_from_slice(&es[start + 2 * len..]);
                if let Ok(t) = Transformation::new(merged) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn is_plain_literal(e: &Element) -> bool {
    matches!(plain_unit(e), Some(Unit::Literal(_)))
}

/// Rendering of `elements` without the one at `skip`, with neighbouring
/// plain literals joined into one literal.
fn render_without(elements: &[Element], parts: &[&str], skip: usize, out: &mut String) {
    const OPEN: &str = "literal('";
    const CLOSE: &str = "')";
    out.clear();
    out.push('<');
    let mut prev_literal = false;
    let mut first = true;
    for (j, (e, part)) in elements.iter().zip(parts).enumerate() {
        if j == skip {
            continue;
        }
        let literal = is_plain_literal(e);
        if literal && prev_literal {
            out.truncate(out.len() - CLOSE.len());
            out.push_str(&part[OPEN.len()..]);
        } else {
            if !first {
                out.push_str(", ");
            }
            out.push_str(part);
        }
        first = false;
        prev_literal = literal;
    }
    out.push('>');
}

/// Adds removal-generalized candidates.
///
/// For each candidate `A` and each non-literal element of `A`, if `A`
/// without that element is in the pool (neighbouring literals merged), `A`
/// with the element marked optional is added. Standalone literals are never
/// made optional. Originals are kept.
pub fn induce_removal(pool: &Pool) -> Pool {
    let mut out = pool.clone();
    out.extend(removal_additions(pool));
    out
}

/// The candidates `induce_removal` would add, possibly with duplicates.
pub(crate) fn removal_additions(pool: &Pool) -> Vec<Transformation> {
    let mut out = Vec::new();
    let mut rest = String::new();
    let mut parts = Vec::new();
    for a in pool {
        let es = a.elements();
        let removable = |e: &Element| !e.optional && !e.is_literal();
        if es.len() < 2 || !es.iter().any(removable) {
            continue;
        }
        a.element_texts_into(&mut parts);
        for i in 0..es.len() {
            if !removable(&es[i]) {
                continue;
            }
            render_without(es, &parts, i, &mut rest);
            if !pool.contains_rendering(&rest) {
                continue;
            }
            let mut flagged = es.to_vec();
            flagged[i].optional = true;
            if let Ok(t) = Transformation::new(flagged) {
                out.push(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    fn pool(items: &[&str]) -> Pool {
        items.iter().map(|s| t(s)).collect()
    }

    #[test]
    fn repetition_example() {
        let p = pool(&[
            "<splitSubstr(' ', s, s, s+1), literal('. '), split(' ', e)>",
            "<splitSubstr(' ', s, s, s+1), literal('. '), splitSubstr(' ', s+1, s, s+1), literal('. '), split(' ', e)>",
        ]);
        let out = induce_repetition(&p, 2);
        assert!(p.is_subset(&out));
        assert_eq!(out.len(), 3);
        assert!(out.contains_rendering("<(splitSubstr(' ', s, s, s+1), literal('. '))^2, split(' ', e)>"));
        assert_eq!(induce_repetition(&p, 1), p);
    }

    #[test]
    fn repetition_single_unit_and_end_anchor() {
        let p = pool(&["<split(' ', e), literal('!')>", "<split(' ', e), split(' ', e-1), literal('!')>"]);
        let out = induce_repetition(&p, 3);
        assert!(out.contains_rendering("<split(' ', e)^3, literal('!')>"));
    }

    #[test]
    fn repetition_needs_both_forms() {
        let p = pool(&["<split(' ', s), split(' ', s+1)>"]);
        assert_eq!(induce_repetition(&p, 2), p);
        let p = pool(&["<literal('a')>", "<literal('b')>"]);
        assert_eq!(induce_repetition(&p, 2), p);
        // copy not shifted by exactly one
        let p = pool(&["<split(' ', s)>", "<split(' ', s), split(' ', s+2)>"]);
        assert_eq!(induce_repetition(&p, 2), p);
    }

    #[test]
    fn removal_example() {
        let p = pool(&[
            "<substr(s, s+1), split(' ', e), literal('@u.ca')>",
            "<split(' ', e), literal('@u.ca')>",
        ]);
        let out = induce_removal(&p);
        assert_eq!(out.len(), 3);
        assert!(out.contains_rendering("<substr(s, s+1)^?, split(' ', e), literal('@u.ca')>"));

        let disjoint = pool(&["<substr(s, e)>", "<split('-', s), literal('x')>"]);
        assert_eq!(induce_removal(&disjoint), disjoint);
    }

    #[test]
    fn removal_merges_literal_neighbours() {
        let p = pool(&["<literal('a'), split(' ', s), literal('b')>", "<literal('ab')>"]);
        let out = induce_removal(&p);
        assert!(out.contains_rendering("<literal('a'), split(' ', s)^?, literal('b')>"));
    }

    #[test]
    fn removal_second_pass_only_adds_single_flag_merges() {
        let p = pool(&[
            "<substr(s, s+1), split(' ', e), literal('@u.ca')>",
            "<split(' ', e), literal('@u.ca')>",
            "<literal('@u.ca')>",
        ]);
        let once = induce_removal(&p);
        let twice = induce_removal(&once);
        assert!(once.is_subset(&twice));
        for added in twice.iter().filter(|x| !once.contains(x)) {
            let flags = added.elements().iter().filter(|e| e.optional).count();
            let parent_found = once.iter().any(|o| {
                o.elements().len() == added.elements().len()
                    && o.elements().iter().zip(added.elements()).filter(|(a, b)| a != b).count() == 1
                    && o.elements().iter().filter(|e| e.optional).count() + 1 == flags
            });
            assert!(parent_found, "{added}");
        }
    }

    #[test]
    fn render_without_matches_rebuilt_form() {
        let cases = [
            "<literal('a'), split(' ', s), literal('b\\'c')>",
            "<split(' ', s), literal('x'), substr(s, e-1)>",
            "<(split(' ', s), literal('-'))^2, literal('.'), split(' ', e), literal('!')>",
            "<literal('a'), substr(s, s+1)^?, split('-', e), literal('z')>",
        ];
        for c in cases {
            let t = t(c);
            let es = t.elements();
            let parts = t.element_texts();
            let owned: Vec<String> = es.iter().map(Element::to_string).collect();
            assert_eq!(parts, owned);
            let mut out = String::new();
            for i in 0..es.len() {
                let mut rest = es.to_vec();
                rest.remove(i);
                // independent rebuild: concatenate literal texts, then render
                let mut merged: Vec<Element> = Vec::new();
                for e in rest {
                    if let (Some(Unit::Literal(next)), Some(Element { body: Body::Unit(Unit::Literal(prev)), repetition: 1, optional: false })) =
                        (plain_unit(&e).cloned(), merged.last_mut())
                    {
                        *prev = alloc::format!("{prev}{next}").into();
                        continue;
                    }
                    merged.push(e);
                }
                let expected: String = if merged.is_empty() {
                    "<>".into()
                } else {
                    let inner: Vec<String> = merged.iter().map(Element::to_string).collect();
                    alloc::format!("<{}>", inner.join(", "))
                };
                render_without(es, &parts, i, &mut out);
                assert_eq!(out, expected, "{c} without {i}");
            }
        }
    }

    #[test]
    fn simplicity_examples() {
        assert_eq!(simplicity(&t("<substr(s, s+1)>")), SimplicityScore { unit_count: 1, param_count: 2 });
        assert_eq!(
            simplicity(&t("<splitSubstr('-', s, s, s+1)>")),
            SimplicityScore { unit_count: 1, param_count: 4 }
        );
        assert_eq!(
            simplicity_order(&t("<substr(s, s+1)>"), &t("<splitSubstr('-', s, s, s+1)>")),
            Ordering::Less
        );
        assert_eq!(simplicity(&t("<literal('x')>")), SimplicityScore { unit_count: 1, param_count: 1 });
        let e: Element = "(split(' ', s))^2^?".parse().unwrap();
        assert_eq!(SimplicityScore::of_element(&e), SimplicityScore { unit_count: 1, param_count: 4 });
        assert_eq!(
            simplicity(&t("<(splitSubstr(' ', s, s, s+1), literal('. '))^2, split(' ', e)>")),
            SimplicityScore { unit_count: 3, param_count: 8 }
        );
    }

    #[test]
    fn simplicity_order_is_total() {
        let items = vec![t("<split(' ', s)>"), t("<substr(s, e)>"), t("<split(' ', e)>")];
        for a in &items {
            for b in &items {
                assert_eq!(simplicity_order(a, b) == Ordering::Equal, a == b);
                assert_eq!(simplicity_order(a, b), simplicity_order(b, a).reverse());
            }
        }
    }
}
