//! Constructions behind the length-two and length-three lemmas.
//!
//! Every construction lists the words its derivation passes through and lets
//! [`Builder`] find the single relation between consecutive words. Free
//! choices take the least admissible point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check, Builder, Derivation};
use crate::error::{Error, Result};
use crate::green::IdealSpec;
use crate::transform::{Family, PartialMap};

type Pm = PartialMap;
type Out = (Pm, Pm, Derivation);

fn pre(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn assign(f: Pm, xs: impl IntoIterator<Item = usize>, y: Option<usize>) -> Pm {
    xs.into_iter().fold(f, |g, x| g.with(x, y))
}

fn bit(mask: u32, x: usize) -> bool {
    mask & (1 << (x - 1)) != 0
}

/// Rules of the length-two lemmas. Names follow the family and the part of
/// the pair that changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    /// I, rule i: the image of `a_{r+1}` moves to `a ∈ B∖{a'_{r+1}}`.
    IImAlpha,
    /// I, rule ii: `a_{r+1}` is replaced by `a ∈ A`.
    IKerAlpha,
    /// I, rule iii: the image of `b_{r+1}` moves to `b ∉ im β`.
    IImBeta,
    /// I, rule iv: `b_{r+1}` is replaced by `b ∈ B∖{a'_{r+1}}`.
    IKerBetaLocal,
    /// I, rule v: `a_i ↦ a'`, with `a'` taking over the role of `a'_i` in β.
    IKerBetaGlobal,
    /// T, rule i: the free class of β gets a new image.
    TImBeta,
    /// T, rule ii: a class of α gets a new image in the same class of β.
    TImAlpha,
    /// T, rule iii: a point outside `im α` changes its class of β.
    TKerBeta,
    /// T, rule iv: split a class of α, merge the two classes over one class of β.
    TKerAlpha,
    /// T: move a point between the two classes of α over one class of β.
    TKerAlphaMove,
    Pt1ImBeta,
    Pt1ImAlpha,
    Pt1KerBeta,
    Pt1KerAlpha,
    Pt1KerAlphaMove,
    /// PT type 2, rule i: drop a point of `A_{r+1}` from the domain of α.
    Pt2KerAlpha,
    /// PT type 2, rule ii: `A_{r+1}` gets a new image outside `dom β`.
    Pt2ImAlpha,
    /// PT type 2, rule iii: `A_i` gets a new image in `B_i`.
    Pt2ImAlphaClass,
    /// PT type 2, rule iv: a point outside `im α` changes its class of β.
    Pt2KerBeta,
    /// PT type 2, rule v: the free class of β gets a new image.
    Pt2ImBeta,
    /// PT: turn a type-2 pair into a type-1 pair.
    PtSwitch,
}

impl RuleKind {
    pub const ALL: [RuleKind; 21] = [
        RuleKind::IImAlpha,
        RuleKind::IKerAlpha,
        RuleKind::IImBeta,
        RuleKind::IKerBetaLocal,
        RuleKind::IKerBetaGlobal,
        RuleKind::TImBeta,
        RuleKind::TImAlpha,
        RuleKind::TKerBeta,
        RuleKind::TKerAlpha,
        RuleKind::TKerAlphaMove,
        RuleKind::Pt1ImBeta,
        RuleKind::Pt1ImAlpha,
        RuleKind::Pt1KerBeta,
        RuleKind::Pt1KerAlpha,
        RuleKind::Pt1KerAlphaMove,
        RuleKind::Pt2KerAlpha,
        RuleKind::Pt2ImAlpha,
        RuleKind::Pt2ImAlphaClass,
        RuleKind::Pt2KerBeta,
        RuleKind::Pt2ImBeta,
        RuleKind::PtSwitch,
    ];

    pub fn family(self) -> Family {
        use RuleKind::*;
        match self {
            IImAlpha | IKerAlpha | IImBeta | IKerBetaLocal | IKerBetaGlobal => Family::I,
            TImBeta | TImAlpha | TKerBeta | TKerAlpha | TKerAlphaMove => Family::T,
            _ => Family::PT,
        }
    }

    /// Pair type the rule applies to, for PT.
    fn pt_type(self) -> Option<u8> {
        use RuleKind::*;
        match self {
            Pt1ImBeta | Pt1ImAlpha | Pt1KerBeta | Pt1KerAlpha | Pt1KerAlphaMove => Some(1),
            Pt2KerAlpha | Pt2ImAlpha | Pt2ImAlphaClass | Pt2KerBeta | Pt2ImBeta | PtSwitch => {
                Some(2)
            }
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleKind::*;
        match self {
            IImAlpha => "i-im-alpha",
            IKerAlpha => "i-ker-alpha",
            IImBeta => "i-im-beta",
            IKerBetaLocal => "i-ker-beta-local",
            IKerBetaGlobal => "i-ker-beta-global",
            TImBeta => "t-im-beta",
            TImAlpha => "t-im-alpha",
            TKerBeta => "t-ker-beta",
            TKerAlpha => "t-ker-alpha",
            TKerAlphaMove => "t-ker-alpha-move",
            Pt1ImBeta => "pt1-im-beta",
            Pt1ImAlpha => "pt1-im-alpha",
            Pt1KerBeta => "pt1-ker-beta",
            Pt1KerAlpha => "pt1-ker-alpha",
            Pt1KerAlphaMove => "pt1-ker-alpha-move",
            Pt2KerAlpha => "pt2-ker-alpha",
            Pt2ImAlpha => "pt2-im-alpha",
            Pt2ImAlphaClass => "pt2-im-alpha-class",
            Pt2KerBeta => "pt2-ker-beta",
            Pt2ImBeta => "pt2-im-beta",
            PtSwitch => "pt-switch",
        }
    }

    /// The side condition, as reported when no admissible choice matches.
    fn condition(self) -> &'static str {
        use RuleKind::*;
        match self {
            IImAlpha => "a ∈ B∖{a'_{r+1}}",
            IKerAlpha => "a ∈ A",
            IImBeta => "b ∉ im β",
            IKerBetaLocal => "b ∈ B∖{a'_{r+1}} (literal reading: B∖{a_{r+1}})",
            IKerBetaGlobal => "a_i ∈ dom αβ and a' ∈ B∖{a'_{r+1}} with |B| ≥ 2",
            TImBeta | Pt1ImBeta | Pt2ImBeta => "new image ∉ im β",
            TImAlpha | Pt1ImAlpha => "new image in the same class of β and ∉ im α",
            Pt2ImAlphaClass => "i ≤ r, |B_i| ≥ 2 and new image in B_i∖{a_i}",
            TKerBeta | Pt1KerBeta | Pt2KerBeta => {
                "moved point ∉ im α, its class keeps a point, the free class keeps a point"
            }
            TKerAlpha | Pt1KerAlpha => {
                "class over its own class of β with |A_i| ≥ 2, |B_i| ≥ 2, two distinct images in B_i"
            }
            TKerAlphaMove | Pt1KerAlphaMove => "point of A_r ∪ A_{r+1} whose class has ≥ 2 points",
            Pt2KerAlpha => "a ∈ A_{r+1} with |A_{r+1}| ≥ 2",
            Pt2ImAlpha => "a'_{r+1} ∈ B∖{a_{r+1}}",
            PtSwitch => "|A_i| ≥ 2, |B_i| ≥ 2, two distinct images in B_i",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown rule `{s}`")))
    }
}

/// Choices left free by a rule. Unset fields take the least admissible value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleParams {
    /// A kernel class of α, named by one of its points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<usize>,
    /// New image, moved point, or new domain point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    /// Destination class of β, named by a point; `0` is the complement of `dom β`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_class: Option<usize>,
    /// One part of a split class; the other part is the rest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part: Option<Vec<usize>>,
    /// Images of `part` and of the rest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<(usize, usize)>,
    /// Literal side condition of the local kernel rule for I.
    #[serde(default)]
    pub literal: bool,
}

impl RuleParams {
    fn matches(&self, o: &RuleParams) -> bool {
        fn eq<T: PartialEq>(want: &Option<T>, have: &Option<T>) -> bool {
            want.is_none() || want == have
        }
        let part = match (&self.part, &o.part) {
            (None, _) => true,
            (Some(p), Some(q)) => {
                let mut p = p.clone();
                p.sort_unstable();
                p == *q
            }
            _ => false,
        };
        eq(&self.class, &o.class)
            && eq(&self.point, &o.point)
            && eq(&self.to_class, &o.to_class)
            && eq(&self.images, &o.images)
            && part
    }
}

/// A pair `α, β ∈ J_{r+1}` with `αβ ∈ J_r`, split into kernel classes.
#[derive(Clone, Debug)]
struct View {
    fam: Family,
    n: usize,
    r: usize,
    a: Pm,
    b: Pm,
    ac: Vec<(Vec<usize>, usize)>,
    bc: Vec<(Vec<usize>, usize)>,
}

fn classes(f: &Pm) -> Vec<(Vec<usize>, usize)> {
    f.kernel_classes()
        .into_iter()
        .map(|c| {
            let y = f.at(c[0]).expect("class points are defined");
            (c, y)
        })
        .collect()
}

impl View {
    fn new(fam: Family, a: Pm, b: Pm) -> Result<View> {
        let n = a.n();
        if b.n() != n {
            return Err(Error::Usage("maps on different ground sets".into()));
        }
        if !a.member(fam) || !b.member(fam) {
            return Err(pre(format!("α and β must lie in {fam}")));
        }
        let k = a.rank();
        if k == 0 || b.rank() != k || a.then(&b).rank() + 1 != k {
            return Err(pre(format!(
                "need α, β ∈ J_(r+1) with αβ ∈ J_r; ranks are {}, {}, {}",
                a.rank(),
                b.rank(),
                a.then(&b).rank()
            )));
        }
        let r = k - 1;
        // |A|, |B| ≥ 2 and two points outside a rank-(r+1) image.
        if r + 3 > n {
            return Err(pre(format!(
                "the constructions need r + 3 ≤ n; got r = {r}, n = {n}"
            )));
        }
        Ok(View {
            fam,
            n,
            r,
            a,
            b,
            ac: classes(&a),
            bc: classes(&b),
        })
    }

    fn window(&self) -> (usize, usize) {
        (self.r + 1, self.r + 2)
    }

    fn bclass(&self, x: usize) -> Option<usize> {
        self.bc.iter().position(|(c, _)| c.contains(&x))
    }

    fn aclass(&self, x: usize) -> Option<usize> {
        self.ac.iter().position(|(c, _)| c.contains(&x))
    }

    fn in_im_a(&self, x: usize) -> bool {
        bit(self.a.image_mask(), x)
    }

    fn in_im_b(&self, x: usize) -> bool {
        bit(self.b.image_mask(), x)
    }

    fn in_dom_a(&self, x: usize) -> bool {
        self.a.at(x).is_some()
    }

    fn in_dom_b(&self, x: usize) -> bool {
        self.b.at(x).is_some()
    }

    fn points(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Classes of α whose image lies in the class `k` of β.
    fn hits(&self, k: usize) -> Vec<usize> {
        (0..self.ac.len())
            .filter(|&i| self.bclass(self.ac[i].1) == Some(k))
            .collect()
    }

    /// The class of β containing no image of α.
    fn free(&self) -> usize {
        (0..self.bc.len())
            .find(|&k| self.hits(k).is_empty())
            .expect("rank count leaves one class of β unhit")
    }

    fn type_one(&self) -> bool {
        self.ac.iter().all(|(_, y)| self.in_dom_b(*y))
    }

    /// Type 1: the two classes of α over one class of β, by least element.
    fn pair(&self) -> Option<(usize, usize)> {
        (0..self.bc.len()).find_map(|k| match self.hits(k)[..] {
            [i, j] => Some((i, j)),
            _ => None,
        })
    }

    /// Type 2: the class of α whose image lies outside `dom β`.
    fn outside(&self) -> Option<usize> {
        (0..self.ac.len()).find(|&i| !self.in_dom_b(self.ac[i].1))
    }

    fn off_b(&self) -> Vec<usize> {
        self.points().filter(|&x| !self.in_dom_b(x)).collect()
    }

    fn off_a(&self) -> Vec<usize> {
        self.points().filter(|&x| !self.in_dom_a(x)).collect()
    }

    fn least_not_in_im_b(&self, avoid: &[usize]) -> Option<usize> {
        self.points()
            .find(|&x| !self.in_im_b(x) && !avoid.contains(&x))
    }

    fn chain(&self, tag: &str, words: &[Vec<Pm>]) -> Result<Derivation> {
        for f in words.iter().flatten() {
            if !f.member(self.fam) {
                return Err(Error::Rejected(format!(
                    "{tag}: auxiliary {f} is not in {}",
                    self.fam
                )));
            }
        }
        let mut bld = Builder::new(vec![self.a, self.b], self.window());
        bld.note(tag);
        bld.path(words)
            .map_err(|e| Error::Rejected(format!("{tag}: {e}")))?;
        let d = bld.finish();
        check(&d).map_err(|e| Error::Rejected(format!("{tag}: {e}")))?;
        Ok(d)
    }

    fn same(&self) -> Out {
        (
            self.a,
            self.b,
            Derivation::empty(vec![self.a, self.b], self.window()),
        )
    }
}

// ---------------------------------------------------------------------------
// I_n

/// `(a_{r+1}, a'_{r+1}, b_{r+1})` for an I pair.
fn i_tops(v: &View) -> (usize, usize, usize) {
    let k = v.outside().expect("I pairs have an image outside dom β");
    let a_top = v.ac[k].0[0];
    let f = v.free();
    (a_top, v.ac[k].1, v.bc[f].0[0])
}

fn i_im_alpha(v: &View, a: usize) -> Result<Out> {
    let (a_top, img_top, _) = i_tops(v);
    if a == img_top {
        return Ok(v.same());
    }
    if v.in_dom_b(a) {
        return Err(pre(format!("{a} must lie outside dom β")));
    }
    let n = v.n;
    let b = v.least_not_in_im_b(&[]).expect("rank below n");
    let beta1 = v.b.with(img_top, Some(b));
    let beta1p = v.b.with(a, Some(b));
    let beta2 = Pm::partial_identity(n, v.b.image());
    let alpha_p = v.a.with(a_top, Some(a));
    let d = v.chain(
        "I rule i",
        &[
            vec![v.a, beta1, beta2],
            vec![v.a.then(&beta1), beta2],
            vec![alpha_p, beta1p, beta2],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

fn i_ker_alpha(v: &View, a: usize) -> Result<Out> {
    let (a_top, img_top, _) = i_tops(v);
    if a == a_top {
        return Ok(v.same());
    }
    if v.in_dom_a(a) {
        return Err(pre(format!("{a} must lie outside dom α")));
    }
    let n = v.n;
    let a2 = v
        .off_a()
        .into_iter()
        .find(|&x| x != a)
        .ok_or_else(|| pre("|A| ≥ 2"))?;
    let b = v
        .off_b()
        .into_iter()
        .find(|&x| x != img_top)
        .ok_or_else(|| pre("|B| ≥ 2"))?;
    let alpha_p = v.a.with(a_top, None).with(a, Some(img_top));
    let alpha1 = Pm::partial_identity(n, v.a.domain().into_iter().chain([a]));
    let alpha2 = v.a.with(a2, Some(b));
    let alpha2p = alpha_p.with(a2, Some(b));
    let beta1 = Pm::partial_identity(n, v.b.domain().into_iter().chain([b]));
    let d = v.chain(
        "I rule ii",
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2, beta1, v.b],
            vec![alpha1, alpha2.then(&beta1), v.b],
            vec![alpha1, alpha2p, beta1, v.b],
            vec![alpha1, alpha2p, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

fn i_im_beta(v: &View, b: usize) -> Result<Out> {
    let (_, img_top, b_top) = i_tops(v);
    if v.b.at(b_top) == Some(b) {
        return Ok(v.same());
    }
    if v.in_im_b(b) {
        return Err(pre(format!("{b} must lie outside im β")));
    }
    let n = v.n;
    let a = v
        .off_b()
        .into_iter()
        .find(|&x| x != img_top)
        .ok_or_else(|| pre("|B| ≥ 2"))?;
    let b2 = v
        .least_not_in_im_b(&[b])
        .ok_or_else(|| pre("a second point outside im β"))?;
    let beta_p = v.b.with(b_top, Some(b));
    let alpha2 = Pm::partial_identity(n, v.a.image().into_iter().chain([a]));
    let beta1 = v.b.with(a, Some(b2));
    let beta1p = beta_p.with(a, Some(b2));
    let beta2 = Pm::partial_identity(n, v.b.image().into_iter().chain([b]));
    let d = v.chain(
        "I rule iii",
        &[
            vec![v.a, alpha2, v.b],
            vec![v.a, alpha2, beta1, beta2],
            vec![v.a, alpha2.then(&beta1), beta2],
            vec![v.a, alpha2, beta1p, beta2],
            vec![v.a, alpha2, beta_p],
            vec![v.a, beta_p],
        ],
    )?;
    Ok((v.a, beta_p, d))
}

fn i_ker_beta_local(v: &View, b: usize, literal: bool) -> Result<Out> {
    let (a_top, img_top, b_top) = i_tops(v);
    if b == b_top {
        return Ok(v.same());
    }
    let excluded = if literal { a_top } else { img_top };
    if v.in_dom_b(b) || b == excluded {
        return Err(pre(format!(
            "{}: got b = {b}",
            RuleKind::IKerBetaLocal.condition()
        )));
    }
    let n = v.n;
    let a = *v.off_a().first().ok_or_else(|| pre("|A| ≥ 1"))?;
    let b2 = v.least_not_in_im_b(&[]).expect("rank below n");
    let img = v.b.at(b_top).expect("b_{r+1} in dom β");
    let beta_p = v.b.with(b_top, None).with(b, Some(img));
    let alpha1 = Pm::partial_identity(n, v.a.domain());
    let alpha2 = v.a.with(a, Some(b_top));
    let alpha2p = v.a.with(a, Some(b));
    let beta1 = v.b.with(b, Some(b2));
    let beta1p = beta_p.with(b_top, Some(b2));
    let beta2 = Pm::partial_identity(n, v.b.image());
    let tag = if literal {
        "I rule iv (literal reading)"
    } else {
        "I rule iv"
    };
    let d = v.chain(
        tag,
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2, beta1, beta2],
            vec![alpha1, alpha2.then(&beta1), beta2],
            vec![alpha1, alpha2p, beta1p, beta2],
            vec![v.a, beta1p, beta2],
            vec![v.a, beta_p],
        ],
    )?;
    Ok((v.a, beta_p, d))
}

fn i_ker_beta_global(v: &View, ai: usize, a2: usize) -> Result<Out> {
    let (a_top, img_top, b_top) = i_tops(v);
    let Some(img_i) = v.a.at(ai).filter(|_| ai != a_top) else {
        return Err(pre(format!("{ai} must lie in dom αβ")));
    };
    if a2 == img_i {
        return Ok(v.same());
    }
    if v.in_dom_b(a2) || a2 == img_top {
        return Err(pre(format!("{a2} must lie in B∖{{a'_(r+1)}}")));
    }
    let n = v.n;
    let a = *v.off_a().first().ok_or_else(|| pre("|A| ≥ 1"))?;
    let bi = v.b.at(img_i).expect("a'_i in dom β");
    let alpha_p = v.a.with(ai, Some(a2));
    let beta_p = v.b.with(img_i, None).with(a2, Some(bi));
    let alpha1 = Pm::partial_identity(n, v.a.domain());
    let alpha2 = v.a.with(a, Some(b_top));
    let alpha2p = alpha_p.with(a, Some(b_top));
    let beta1 = Pm::partial_identity(n, v.b.domain().into_iter().chain([a2]));
    let beta1p = beta1.with(img_i, Some(a2)).with(a2, Some(img_i));
    let d = v.chain(
        "I rule v",
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2, beta1, v.b],
            vec![alpha1, alpha2.then(&beta1), v.b],
            vec![alpha1, alpha2p, beta1p, v.b],
            vec![alpha_p, beta1p, v.b],
            vec![alpha_p, beta_p],
        ],
    )?;
    Ok((alpha_p, beta_p, d))
}

// ---------------------------------------------------------------------------
// T_n and PT_n

/// Moves `x ∉ im α` to the class of β at index `dest`, or out of `dom β`.
fn right_move(v: &View, x: usize, dest: Option<usize>) -> Result<Out> {
    if v.in_im_a(x) {
        return Err(pre(format!("{x} lies in im α")));
    }
    let src = v.bclass(x);
    if src == dest {
        return Ok(v.same());
    }
    if dest.is_none() && v.fam == Family::T {
        return Err(pre("maps in T are total"));
    }
    if let Some(s) = src {
        if v.bc[s].0.len() < 2 {
            return Err(pre(format!("the class of {x} in β would become empty")));
        }
    }
    let f = v.free();
    let p = *v.bc[f]
        .0
        .iter()
        .find(|&&y| y != x)
        .ok_or_else(|| pre("the free class of β needs a point besides the moved one"))?;
    let n = v.n;
    let f1 = v.least_not_in_im_b(&[]).expect("rank below n");
    let f2 = v
        .least_not_in_im_b(&[f1])
        .ok_or_else(|| pre("two points outside im β"))?;
    let alpha1 = match v.fam {
        Family::T => Pm::new(
            n,
            &v.points()
                .map(|y| Some(if v.in_im_a(y) { y } else { p }))
                .collect::<Vec<_>>(),
        )?,
        _ => Pm::partial_identity(n, v.a.image().into_iter().chain([p])),
    };
    let beta1 = v.b.with(x, Some(f1));
    let beta1p = v.b.with(x, Some(f2));
    let base = match v.fam {
        Family::T => {
            let y0 = v.b.image()[0];
            Pm::new(n, &vec![Some(y0); n])?
        }
        _ => Pm::empty(n),
    };
    let beta2 =
        v.b.image()
            .into_iter()
            .fold(base, |g, y| g.with(y, Some(y)))
            .with(f1, src.map(|s| v.bc[s].1))
            .with(f2, dest.map(|t| v.bc[t].1));
    let beta_p = v.b.with(x, dest.map(|t| v.bc[t].1));
    let d = v.chain(
        "change ker beta",
        &[
            vec![v.a, alpha1, v.b],
            vec![v.a, alpha1, beta1, beta2],
            vec![v.a, alpha1.then(&beta1), beta2],
            vec![v.a, alpha1, beta1p, beta2],
            vec![v.a, alpha1, beta_p],
            vec![v.a, beta_p],
        ],
    )?;
    Ok((v.a, beta_p, d))
}

/// Gives the class `k` of α the image `t`, which lies with the old image in
/// one class of β (or, like it, outside `dom β`) and outside `im α`.
fn left_image(v: &View, k: usize, t: usize) -> Result<Out> {
    let c = v.ac[k].1;
    if c == t {
        return Ok(v.same());
    }
    if v.in_im_a(t) || v.bclass(t) != v.bclass(c) {
        return Err(pre(format!(
            "new image {t} must lie outside im α in the class of β of {c}"
        )));
    }
    let n = v.n;
    let q = v.bc[v.free()].0[0];
    let alpha2 = match v.fam {
        Family::T => Pm::new(
            n,
            &v.points()
                .map(|y| Some(if v.in_im_a(y) { y } else { q }))
                .collect::<Vec<_>>(),
        )?,
        _ => Pm::partial_identity(n, v.a.image().into_iter().chain([q])),
    };
    let alpha2p = alpha2.with(c, Some(t));
    let alpha_p = assign(v.a, v.ac[k].0.iter().copied(), Some(t));
    let d = v.chain(
        "change im alpha",
        &[
            vec![v.a, alpha2, v.b],
            vec![v.a, alpha2.then(&v.b)],
            vec![v.a, alpha2p, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

/// Gives the free class of β the image `t ∉ im β`.
fn free_image(v: &View, t: usize) -> Result<Out> {
    let f = v.free();
    if v.bc[f].1 == t {
        return Ok(v.same());
    }
    if v.in_im_b(t) {
        return Err(pre(format!("{t} lies in im β")));
    }
    let n = v.n;
    let beta_p = assign(v.b, v.bc[f].0.iter().copied(), Some(t));
    if v.type_one() {
        let (i, j) = v.pair().expect("type 1 pair");
        let (ar, atop) = (v.ac[i].1, v.ac[j].1);
        let dk = v.bclass(ar).expect("type 1");
        let br = v.bc[dk].1;
        let b2 = v
            .least_not_in_im_b(&[t])
            .ok_or_else(|| pre("two points outside im β"))?;
        let alpha1 = Pm::new(
            n,
            &v.points()
                .map(|y| Some(if v.in_im_a(y) && y != atop { y } else { atop }))
                .collect::<Vec<_>>(),
        )?;
        let split = v.bc[dk].0.iter().copied().filter(|&y| y != ar);
        let beta1 = assign(v.b, split, Some(b2));
        let beta1p = assign(beta1, v.bc[f].0.iter().copied(), Some(t));
        let base = match v.fam {
            Family::T => Pm::new(n, &vec![Some(v.b.image()[0]); n])?,
            _ => Pm::empty(n),
        };
        let beta2 =
            v.b.image()
                .into_iter()
                .fold(base, |g, y| g.with(y, Some(y)))
                .with(b2, Some(br))
                .with(t, Some(t));
        let tag = if v.fam == Family::T {
            "T rule i"
        } else {
            "PT type 1 change im b"
        };
        let d = v.chain(
            tag,
            &[
                vec![v.a, alpha1, v.b],
                vec![v.a, alpha1, beta1, beta2],
                vec![v.a, alpha1.then(&beta1), beta2],
                vec![v.a, alpha1, beta1p, beta2],
                vec![v.a, alpha1, beta_p],
                vec![v.a, beta_p],
            ],
        )?;
        Ok((v.a, beta_p, d))
    } else {
        let b = v
            .least_not_in_im_b(&[t])
            .ok_or_else(|| pre("two points outside im β"))?;
        let alpha1 = Pm::partial_identity(n, v.a.image());
        let off = v.off_b();
        let beta1 = assign(v.b, off.iter().copied(), Some(b));
        let beta1p = assign(beta_p, off.iter().copied(), Some(b));
        let beta2 = Pm::partial_identity(n, v.b.image().into_iter().chain([t]));
        let d = v.chain(
            "PT type 2 change im b",
            &[
                vec![v.a, alpha1, v.b],
                vec![v.a, alpha1, beta1, beta2],
                vec![v.a, alpha1.then(&beta1), beta2],
                vec![v.a, alpha1, beta1p, beta2],
                vec![v.a, alpha1, beta_p],
                vec![v.a, beta_p],
            ],
        )?;
        Ok((v.a, beta_p, d))
    }
}

/// Type 1: moves `x` from its class of α to the other class over the same
/// class of β.
fn move_kernel_alpha(v: &View, x: usize) -> Result<Out> {
    let (i, j) = v.pair().ok_or_else(|| pre("pair of type 1 required"))?;
    let (src, dst) = match v.aclass(x) {
        Some(k) if k == i => (i, j),
        Some(k) if k == j => (j, i),
        _ => return Err(pre(format!("{x} must lie in A_r ∪ A_(r+1)"))),
    };
    if v.ac[src].0.len() < 2 {
        return Err(pre("the source class needs at least two points"));
    }
    let dk = v.bclass(v.ac[src].1).expect("type 1");
    if v.bc[dk].0.len() >= 3 {
        return move_kernel_alpha_wide(v, x, src, dst, dk);
    }
    // |B_r| = 2: borrow a point of another class of β, then return it.
    let f = v.free();
    let candidate = v.points().find(|&y| {
        !v.in_im_a(y)
            && v.bclass(y) != Some(dk)
            && v.bclass(y).is_none_or(|s| v.bc[s].0.len() >= 2)
            && v.bc[f].0.iter().any(|&z| z != y)
    });
    let y = candidate.ok_or_else(|| pre("no point can be moved into B_r"))?;
    let home = v.bclass(y).map(|s| {
        v.bc[s]
            .0
            .iter()
            .copied()
            .find(|&z| z != y)
            .expect("class keeps a point")
    });
    let (a1, b1, d1) = right_move(v, y, Some(dk))?;
    let v1 = View::new(v.fam, a1, b1)?;
    let (src1, dst1) = (
        v1.aclass(x).expect("x stays"),
        v1.aclass(v.ac[dst].0[0]).expect("class stays"),
    );
    let dk1 = v1.bclass(v1.ac[src1].1).expect("type 1");
    let (a2, b2, mut d2) = move_kernel_alpha_wide(&v1, x, src1, dst1, dk1)?;
    d2.notes.push("case |B_r| = 2".into());
    let v2 = View::new(v.fam, a2, b2)?;
    let back = home.map(|z| v2.bclass(z).expect("home class survives"));
    let (a3, b3, d3) = right_move(&v2, y, back)?;
    Ok((a3, b3, d1.then(&d2)?.then(&d3)?))
}

fn move_kernel_alpha_wide(v: &View, x: usize, src: usize, dst: usize, dk: usize) -> Result<Out> {
    let n = v.n;
    let (ks, kd) = (v.ac[src].1, v.ac[dst].1);
    let a2 = *v.bc[dk]
        .0
        .iter()
        .find(|&&y| y != ks && y != kd)
        .expect("|B_r| ≥ 3");
    let f = v.free();
    let a3 = v.bc[f].0[0];
    let alpha1 = assign(v.a.with(x, Some(kd)), v.ac[dst].0.iter().copied(), Some(a2));
    // α2 and β1 send each class of β to a point inside it.
    let mut alpha2 = Pm::empty(n);
    let mut beta1 = Pm::empty(n);
    for (k, (cls, _)) in v.bc.iter().enumerate() {
        for &y in cls {
            let (u, w) = if k == dk {
                (if y == a2 { kd } else { ks }, if y == ks { ks } else { kd })
            } else if k == f {
                (a3, a3)
            } else {
                let img = v.ac[v.hits(k)[0]].1;
                (img, img)
            };
            alpha2 = alpha2.with(y, Some(u));
            beta1 = beta1.with(y, Some(w));
        }
    }
    let alpha_p = v.a.with(x, Some(kd));
    let tag = if v.fam == Family::T {
        "T change ker alpha 1"
    } else {
        "PT type 1 change ker a"
    };
    let d = v.chain(
        tag,
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, v.b],
            vec![alpha1, beta1, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

/// Type 1: splits the class `k` of α into `part ↦ p` and the rest `↦ q`, and
/// merges the two classes over one class of β onto the lesser image.
fn split_merge(v: &View, k: usize, part: &[usize], p: usize, q: usize) -> Result<Out> {
    let (i, j) = v.pair().ok_or_else(|| pre("pair of type 1 required"))?;
    if k == i || k == j {
        return Err(pre("the split class must lie alone over its class of β"));
    }
    let (cls, c) = (&v.ac[k].0, v.ac[k].1);
    let rest: Vec<usize> = cls.iter().copied().filter(|y| !part.contains(y)).collect();
    if part.is_empty() || rest.is_empty() || !part.iter().all(|y| cls.contains(y)) {
        return Err(pre("part must be a nonempty proper subset of A_i"));
    }
    let ck = v.bclass(c);
    if p == q || v.bclass(p) != ck || v.bclass(q) != ck {
        return Err(pre("images must be two distinct points of B_i"));
    }
    let n = v.n;
    let (ar, atop) = (v.ac[i].1, v.ac[j].1);
    let merged = ar.min(atop);
    let a = v.bc[v.free()].0[0];
    let alpha1 = assign(
        assign(v.a, part.iter().copied(), Some(p)),
        rest.iter().copied(),
        Some(q),
    );
    let base = match v.fam {
        Family::T => Pm::new(n, &vec![Some(a); n])?,
        _ => Pm::partial_identity(n, [a]),
    };
    let keep = |g: Pm, skip: &[usize]| {
        v.a.image()
            .into_iter()
            .filter(|y| !skip.contains(y))
            .fold(g, |g, y| g.with(y, Some(y)))
    };
    let alpha2 = keep(base, &[c]).with(p, Some(c)).with(q, Some(c));
    let alpha2p = keep(base, &[c, ar, atop])
        .with(p, Some(p))
        .with(q, Some(q))
        .with(ar, Some(merged))
        .with(atop, Some(merged));
    let alpha_p = assign(
        alpha1,
        v.ac[i].0.iter().chain(&v.ac[j].0).copied(),
        Some(merged),
    );
    let tag = if v.fam == Family::T {
        "T change ker alpha 2"
    } else {
        "PT type 1 change im a"
    };
    let d = v.chain(
        tag,
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2.then(&v.b)],
            vec![alpha1, alpha2p, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

/// Type 2 to type 1: splits the class `k` of α over `B_i` and drops `A_{r+1}`.
fn switch(v: &View, k: usize, part: &[usize], p: usize, q: usize) -> Result<Out> {
    let o = v.outside().ok_or_else(|| pre("pair of type 2 required"))?;
    if k == o {
        return Err(pre("the split class must have its image in dom β"));
    }
    let (cls, c) = (&v.ac[k].0, v.ac[k].1);
    let rest: Vec<usize> = cls.iter().copied().filter(|y| !part.contains(y)).collect();
    if part.is_empty() || rest.is_empty() || !part.iter().all(|y| cls.contains(y)) {
        return Err(pre(
            "part must be a nonempty proper subset of A_i (|A_i| ≥ 2)",
        ));
    }
    let ck = v.bclass(c);
    if p == q || v.bclass(p) != ck || v.bclass(q) != ck {
        return Err(pre("images must be two distinct points of B_i (|B_i| ≥ 2)"));
    }
    let n = v.n;
    let atop = v.ac[o].1;
    let b = v.bc[v.free()].0[0];
    let alpha1 = assign(
        assign(v.a, part.iter().copied(), Some(p)),
        rest.iter().copied(),
        Some(q),
    );
    let im1 = alpha1.image_mask();
    let q0 = v
        .points()
        .find(|&y| !bit(im1, y))
        .expect("rank r+2 below n");
    let others: Vec<usize> =
        v.a.image()
            .into_iter()
            .filter(|&y| y != c && y != atop)
            .collect();
    let alpha2 = Pm::partial_identity(n, others.iter().copied().chain([atop]))
        .with(p, Some(c))
        .with(q, Some(c))
        .with(q0, Some(b));
    let alpha2p = Pm::partial_identity(n, others.iter().copied().chain([p, q])).with(q0, Some(b));
    let alpha_p = assign(alpha1, v.ac[o].0.iter().copied(), None);
    let d = v.chain(
        "PT switch",
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2.then(&v.b)],
            vec![alpha1, alpha2p, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

/// Type 2: removes `x ∈ A_{r+1}` from the domain of α.
fn drop_point(v: &View, x: usize) -> Result<Out> {
    let o = v.outside().ok_or_else(|| pre("pair of type 2 required"))?;
    if !v.ac[o].0.contains(&x) || v.ac[o].0.len() < 2 {
        return Err(pre(format!("{x} must lie in A_(r+1) with |A_(r+1)| ≥ 2")));
    }
    let n = v.n;
    let atop = v.ac[o].1;
    let a2 = v.bc[v.free()].0[0];
    let a1 = v
        .points()
        .find(|&y| !v.in_im_a(y) && y != a2)
        .expect("n ≥ r + 3");
    let alpha1 = v.a.with(x, Some(a1));
    let lower: Vec<usize> = v.a.image().into_iter().filter(|&y| y != atop).collect();
    let alpha2 =
        Pm::partial_identity(n, lower.iter().copied().chain([atop, a2])).with(a1, Some(atop));
    let alpha2p = Pm::partial_identity(n, lower.iter().copied().chain([atop, a2]));
    let alpha_p = v.a.with(x, None);
    let d = v.chain(
        "PT type 2 change ker a",
        &[
            vec![alpha1, alpha2, v.b],
            vec![alpha1, alpha2.then(&v.b)],
            vec![alpha1, alpha2p, v.b],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

/// Type 2: gives `A_{r+1}` the image `t ∉ dom β`.
fn out_image(v: &View, t: usize) -> Result<Out> {
    let o = v.outside().ok_or_else(|| pre("pair of type 2 required"))?;
    let atop = v.ac[o].1;
    if t == atop {
        return Ok(v.same());
    }
    if v.in_dom_b(t) {
        return Err(pre(format!("{t} must lie outside dom β")));
    }
    let n = v.n;
    let b = v.least_not_in_im_b(&[]).expect("rank below n");
    let beta1 = v.b.with(atop, Some(b)).with(t, Some(b));
    let beta2 = Pm::partial_identity(n, v.b.image());
    let alpha_p = assign(v.a, v.ac[o].0.iter().copied(), Some(t));
    let d = v.chain(
        "PT type 2 change im a",
        &[
            vec![v.a, beta1, beta2],
            vec![v.a.then(&beta1), beta2],
            vec![alpha_p, beta1, beta2],
            vec![alpha_p, v.b],
        ],
    )?;
    Ok((alpha_p, v.b, d))
}

// ---------------------------------------------------------------------------
// Rule dispatch

fn subsets_with_min(cls: &[usize]) -> Vec<Vec<usize>> {
    let rest = &cls[1..];
    let mut out = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        if mask.count_ones() as usize == rest.len() {
            continue;
        }
        let mut p = vec![cls[0]];
        p.extend(
            rest.iter()
                .enumerate()
                .filter(|(i, _)| bit(mask, i + 1))
                .map(|(_, &y)| y),
        );
        out.push(p);
    }
    out
}

fn distinct_pairs(pts: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &p in pts {
        for &q in pts {
            if p != q {
                out.push((p, q));
            }
        }
    }
    out
}

fn move_options(v: &View) -> Vec<RuleParams> {
    let f = v.free();
    let mut out = Vec::new();
    for x in v.points().filter(|&x| !v.in_im_a(x)) {
        let src = v.bclass(x);
        if src.is_some_and(|s| v.bc[s].0.len() < 2) || v.bc[f].0.iter().all(|&z| z == x) {
            continue;
        }
        let mut dests: Vec<Option<usize>> = (0..v.bc.len()).map(Some).collect();
        if v.fam != Family::T {
            dests.push(None);
        }
        for d in dests.into_iter().filter(|&d| d != src) {
            let to = d.map_or(0, |k| v.bc[k].0[0]);
            out.push(RuleParams {
                point: Some(x),
                to_class: Some(to),
                ..Default::default()
            });
        }
    }
    out
}

fn split_options(v: &View, allowed: impl Fn(usize) -> bool) -> Vec<RuleParams> {
    let mut out = Vec::new();
    for (k, (cls, c)) in v.ac.iter().enumerate() {
        if !allowed(k) || cls.len() < 2 {
            continue;
        }
        let Some(ck) = v.bclass(*c) else { continue };
        for part in subsets_with_min(cls) {
            for (p, q) in distinct_pairs(&v.bc[ck].0) {
                out.push(RuleParams {
                    class: Some(cls[0]),
                    part: Some(part.clone()),
                    images: Some((p, q)),
                    ..Default::default()
                });
            }
        }
    }
    out
}

fn point(x: usize) -> RuleParams {
    RuleParams {
        point: Some(x),
        ..Default::default()
    }
}

fn check_kind(kind: RuleKind, v: &View) -> Result<()> {
    if kind.family() != v.fam {
        return Err(Error::Usage(format!(
            "rule {kind} is for family {}",
            kind.family()
        )));
    }
    match kind.pt_type() {
        Some(1) if !v.type_one() => Err(pre(format!("rule {kind} needs a pair of type 1"))),
        Some(2) if v.type_one() => Err(pre(format!("rule {kind} needs a pair of type 2"))),
        _ => Ok(()),
    }
}

fn options(kind: RuleKind, v: &View, literal: bool) -> Vec<RuleParams> {
    use RuleKind::*;
    let pts = || v.points();
    match kind {
        IImAlpha => {
            let (_, img_top, _) = i_tops(v);
            pts()
                .filter(|&a| !v.in_dom_b(a) && a != img_top)
                .map(point)
                .collect()
        }
        IKerAlpha => v.off_a().into_iter().map(point).collect(),
        IImBeta => pts().filter(|&b| !v.in_im_b(b)).map(point).collect(),
        IKerBetaLocal => {
            let (a_top, img_top, _) = i_tops(v);
            let excluded = if literal { a_top } else { img_top };
            v.off_b()
                .into_iter()
                .filter(|&b| b != excluded)
                .map(point)
                .collect()
        }
        IKerBetaGlobal => {
            let (a_top, img_top, _) = i_tops(v);
            let mut out = Vec::new();
            for ai in v.a.domain().into_iter().filter(|&x| x != a_top) {
                for a2 in v.off_b().into_iter().filter(|&y| y != img_top) {
                    out.push(RuleParams {
                        class: Some(ai),
                        point: Some(a2),
                        ..Default::default()
                    });
                }
            }
            out
        }
        TImBeta | Pt1ImBeta | Pt2ImBeta => pts().filter(|&t| !v.in_im_b(t)).map(point).collect(),
        TImAlpha | Pt1ImAlpha | Pt2ImAlphaClass => {
            let o = v.outside();
            let mut out = Vec::new();
            for (k, (cls, c)) in v.ac.iter().enumerate() {
                if Some(k) == o {
                    continue;
                }
                let ck = v.bclass(*c);
                for t in pts().filter(|&t| !v.in_im_a(t) && v.bclass(t) == ck) {
                    out.push(RuleParams {
                        class: Some(cls[0]),
                        point: Some(t),
                        ..Default::default()
                    });
                }
            }
            out
        }
        TKerBeta | Pt1KerBeta | Pt2KerBeta => move_options(v),
        TKerAlpha | Pt1KerAlpha => {
            let (i, j) = v.pair().expect("type 1");
            split_options(v, |k| k != i && k != j)
        }
        TKerAlphaMove | Pt1KerAlphaMove => {
            let (i, j) = v.pair().expect("type 1");
            [i, j]
                .into_iter()
                .filter(|&k| v.ac[k].0.len() >= 2)
                .flat_map(|k| v.ac[k].0.clone())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .map(point)
                .collect()
        }
        Pt2KerAlpha => {
            let o = v.outside().expect("type 2");
            if v.ac[o].0.len() < 2 {
                Vec::new()
            } else {
                v.ac[o].0.iter().copied().map(point).collect()
            }
        }
        Pt2ImAlpha => {
            let o = v.outside().expect("type 2");
            v.off_b()
                .into_iter()
                .filter(|&t| t != v.ac[o].1)
                .map(point)
                .collect()
        }
        PtSwitch => {
            let o = v.outside().expect("type 2");
            split_options(v, |k| k != o)
        }
    }
}

/// Whether the requested values leave the pair unchanged.
fn is_identity(kind: RuleKind, v: &View, p: &RuleParams) -> bool {
    use RuleKind::*;
    let Some(x) = p.point else { return false };
    match kind {
        IImAlpha => x == i_tops(v).1,
        IKerAlpha => x == i_tops(v).0,
        IImBeta => v.b.at(i_tops(v).2) == Some(x),
        IKerBetaLocal => x == i_tops(v).2,
        IKerBetaGlobal => p.class.is_some_and(|c| v.a.at(c) == Some(x)),
        TImBeta | Pt1ImBeta | Pt2ImBeta => v.bc[v.free()].1 == x,
        TImAlpha | Pt1ImAlpha | Pt2ImAlphaClass => p.class.is_some_and(|c| v.a.at(c) == Some(x)),
        Pt2ImAlpha => v.outside().is_some_and(|o| v.ac[o].1 == x),
        TKerBeta | Pt1KerBeta | Pt2KerBeta => match p.to_class {
            Some(0) => !v.in_dom_b(x),
            Some(t) => v.in_dom_b(t) && v.bclass(t) == v.bclass(x),
            None => false,
        },
        _ => false,
    }
}

fn run(kind: RuleKind, v: &View, p: &RuleParams) -> Result<Out> {
    use RuleKind::*;
    let x = p.point.unwrap_or_default();
    let class_of = |y: Option<usize>| -> Result<usize> {
        y.and_then(|y| v.aclass(y))
            .ok_or_else(|| pre("class must name a point of dom α"))
    };
    match kind {
        IImAlpha => i_im_alpha(v, x),
        IKerAlpha => i_ker_alpha(v, x),
        IImBeta => i_im_beta(v, x),
        IKerBetaLocal => i_ker_beta_local(v, x, p.literal),
        IKerBetaGlobal => i_ker_beta_global(v, p.class.unwrap_or_default(), x),
        TImBeta | Pt1ImBeta | Pt2ImBeta => free_image(v, x),
        TImAlpha | Pt1ImAlpha | Pt2ImAlphaClass => left_image(v, class_of(p.class)?, x),
        TKerBeta | Pt1KerBeta | Pt2KerBeta => {
            let dest = match p.to_class {
                Some(0) => None,
                Some(t) => Some(
                    v.bclass(t)
                        .ok_or_else(|| pre("to_class must name a point of dom β or be 0"))?,
                ),
                None => return Err(pre("destination class required")),
            };
            right_move(v, x, dest)
        }
        TKerAlpha | Pt1KerAlpha | PtSwitch => {
            let k = class_of(p.class)?;
            let part = p.part.clone().unwrap_or_default();
            let (a, b) = p.images.ok_or_else(|| pre("images required"))?;
            if kind == PtSwitch {
                switch(v, k, &part, a, b)
            } else {
                split_merge(v, k, &part, a, b)
            }
        }
        TKerAlphaMove | Pt1KerAlphaMove => move_kernel_alpha(v, x),
        Pt2KerAlpha => drop_point(v, x),
        Pt2ImAlpha => out_image(v, x),
    }
}

/// Every parameter choice admitted by the rule's side conditions at `(α, β)`,
/// least first. Choices that leave the pair unchanged are not listed.
pub fn admissible(kind: RuleKind, alpha: &Pm, beta: &Pm, literal: bool) -> Result<Vec<RuleParams>> {
    let v = View::new(kind.family(), *alpha, *beta)?;
    check_kind(kind, &v)?;
    let mut out = options(kind, &v, literal);
    for o in &mut out {
        o.literal = literal;
    }
    Ok(out)
}

/// Applies one rule to `x_α x_β`, returning `(α′, β′)` and a derivation of
/// `x_{α′} x_{β′}` from `x_α x_β` in the window `[r+1, r+2]`.
pub fn apply_rule(kind: RuleKind, alpha: &Pm, beta: &Pm, params: &RuleParams) -> Result<Out> {
    let v = View::new(kind.family(), *alpha, *beta)?;
    check_kind(kind, &v)?;
    if is_identity(kind, &v, params) {
        return Ok(v.same());
    }
    let chosen = options(kind, &v, params.literal)
        .into_iter()
        .find(|o| params.matches(o))
        .ok_or_else(|| {
            pre(format!(
                "{kind}: no admissible choice; needs {}",
                kind.condition()
            ))
        })?;
    let chosen = RuleParams {
        literal: params.literal,
        ..chosen
    };
    run(kind, &v, &chosen)
}

// ---------------------------------------------------------------------------
// Equalising pairs

struct Walk {
    fam: Family,
    a: Pm,
    b: Pm,
    d: Derivation,
}

impl Walk {
    fn new(fam: Family, a: Pm, b: Pm, r: usize) -> Walk {
        Walk {
            fam,
            a,
            b,
            d: Derivation::empty(vec![a, b], (r + 1, r + 2)),
        }
    }

    fn view(&self) -> Result<View> {
        View::new(self.fam, self.a, self.b)
    }

    fn push(&mut self, a: Pm, b: Pm, d: &Derivation) -> Result<()> {
        let cur = std::mem::replace(&mut self.d, Derivation::empty(Vec::new(), (0, 0)));
        self.d = cur.then(d)?;
        self.a = a;
        self.b = b;
        Ok(())
    }

    fn step(&mut self, f: impl FnOnce(&View) -> Result<Out>) -> Result<()> {
        let v = self.view()?;
        let (a, b, d) = f(&v)?;
        self.push(a, b, &d)
    }

    /// Moves to `target` by reading a construction at `target` backwards.
    fn step_back(&mut self, target: (Pm, Pm), f: impl FnOnce(&View) -> Result<Out>) -> Result<()> {
        let v = View::new(self.fam, target.0, target.1)?;
        let (a, b, d) = f(&v)?;
        if (a, b) != (self.a, self.b) {
            return Err(Error::Rejected(
                "backward construction misses the current pair".into(),
            ));
        }
        self.push(target.0, target.1, &d.reversed())
    }

    /// Moves some point outside `im α` into the class of β containing `rep`,
    /// or out of `dom β` when `rep` is `None`.
    fn enlarge(&mut self, rep: Option<usize>, avoid: &[usize]) -> Result<()> {
        let v = self.view()?;
        let dest = rep.map(|y| v.bclass(y).expect("rep in dom β"));
        let f = v.free();
        let u = v.points().find(|&u| {
            !v.in_im_a(u)
                && !avoid.contains(&u)
                && v.bclass(u) != dest
                && v.bclass(u).is_none_or(|s| v.bc[s].0.len() >= 2)
                && v.bc[f].0.iter().any(|&z| z != u)
        });
        let u = u.ok_or_else(|| Error::Rejected("no point available to enlarge a class".into()))?;
        self.step(|v| right_move(v, u, dest))
    }

    fn note(&mut self, tag: &str) {
        self.d.notes.push(tag.into());
    }
}

fn eq_i(w: &mut Walk, ta: Pm, tb: Pm) -> Result<()> {
    let tv = View::new(Family::I, ta, tb)?;
    let (ta_top, ta_img, tb_top) = i_tops(&tv);
    w.note("step 1: images of dom αβ");
    for x in ta.domain().into_iter().filter(|&x| x != ta_top) {
        let t = ta.at(x).expect("in domain");
        let v = w.view()?;
        if v.a.at(x) == Some(t) {
            continue;
        }
        let (_, top_img, d_top) = i_tops(&v);
        let spare = || {
            v.off_b()
                .into_iter()
                .find(|&y| y != top_img)
                .ok_or_else(|| pre("|B| ≥ 2"))
        };
        if t == top_img {
            let s = spare()?;
            w.step(|v| i_im_alpha(v, s))?;
        } else if t == d_top {
            let s = spare()?;
            w.step(|v| i_ker_beta_local(v, s, false))?;
        } else if let Some(y) = v.a.preimage(t).first().copied() {
            let s = spare()?;
            w.step(|v| i_ker_beta_global(v, y, s))?;
        }
        w.step(|v| i_ker_beta_global(v, x, t))?;
    }
    w.note("step 2: a_(r+1) and its image");
    w.step(|v| i_ker_alpha(v, ta_top))?;
    let v = w.view()?;
    let (_, top_img, d_top) = i_tops(&v);
    if top_img != ta_img && ta_img == d_top {
        let s = v
            .off_b()
            .into_iter()
            .find(|&y| y != top_img)
            .ok_or_else(|| pre("|B| ≥ 2"))?;
        w.step(|v| i_ker_beta_local(v, s, false))?;
    }
    w.step(|v| i_im_alpha(v, ta_img))?;
    w.note("step 3: b_(r+1) and its image");
    w.step(|v| i_im_beta(v, tb.at(tb_top).expect("in domain")))?;
    w.step(|v| i_ker_beta_local(v, tb_top, false))?;
    Ok(())
}

/// The class of β (in `v`) that a point outside `im α` belongs to in the
/// target pair `tv`, whose left map equals the current one.
fn home_class(v: &View, tv: &View, x: usize) -> Option<Option<usize>> {
    let tk = tv.bclass(x)?;
    let anchor = tv.bc[tk].0.iter().copied().find(|&y| tv.in_im_a(y));
    Some(match anchor {
        Some(y) => v.bclass(y),
        None => Some(v.free()),
    })
}

/// Aligns the right map once the left maps agree, then the free image.
fn eq_right(w: &mut Walk, tv: &View) -> Result<()> {
    w.note("right map: kernel");
    let tf = tv.free();
    for &x in &tv.bc[tf].0 {
        let v = w.view()?;
        let f = v.free();
        if v.bclass(x) != Some(f) {
            w.step(|v| right_move(v, x, Some(f)))?;
        }
    }
    for x in tv.points().filter(|&x| !tv.in_im_a(x)) {
        let v = w.view()?;
        let dest = home_class(&v, tv, x).unwrap_or(None);
        if v.bclass(x) != dest {
            w.step(|v| right_move(v, x, dest))?;
        }
    }
    w.note("right map: free image");
    w.step(|v| free_image(v, tv.bc[tf].1))
}

/// Makes the image of `t` free for the class of α containing `x`.
fn clear_image(w: &mut Walk, t: usize) -> Result<()> {
    let v = w.view()?;
    let Some(k2) = v.ac.iter().position(|(_, y)| *y == t) else {
        return Ok(());
    };
    if v.outside() == Some(k2) {
        if !v.off_b().iter().any(|&y| y != t) {
            w.enlarge(None, &[t])?;
        }
        let v = w.view()?;
        let s = v.off_b().into_iter().find(|&y| y != t).expect("enlarged");
        return w.step(|v| out_image(v, s));
    }
    let ck = v.bclass(t).expect("image in dom β");
    if v.bc[ck].0.iter().all(|&y| v.in_im_a(y)) {
        w.enlarge(Some(t), &[t])?;
    }
    let v = w.view()?;
    let ck = v.bclass(t).expect("image in dom β");
    let s = v.bc[ck]
        .0
        .iter()
        .copied()
        .find(|&y| !v.in_im_a(y))
        .expect("enlarged");
    let k2 = v.aclass(v.ac[k2].0[0]).expect("class persists");
    w.step(|v| left_image(v, k2, s))
}

/// Gives the class of α containing `x` the image `t`.
fn set_image(w: &mut Walk, x: usize, t: usize) -> Result<()> {
    let v = w.view()?;
    let c = v.a.at(x).expect("x in dom α");
    if c == t {
        return Ok(());
    }
    clear_image(w, t)?;
    let v = w.view()?;
    let c = v.a.at(x).expect("x in dom α");
    if v.bclass(t) != v.bclass(c) {
        let f = v.free();
        if v.bclass(t) == Some(f) && v.bc[f].0.len() == 1 {
            w.enlarge(Some(t), &[t])?;
        }
        w.step(|v| right_move(v, t, v.bclass(c)))?;
    }
    let v = w.view()?;
    let k = v.aclass(x).expect("x in dom α");
    if v.outside() == Some(k) {
        w.step(|v| out_image(v, t))
    } else {
        w.step(|v| left_image(v, k, t))
    }
}

fn eq_type_one(w: &mut Walk, ta: Pm, tb: Pm) -> Result<()> {
    let tv = View::new(w.fam, ta, tb)?;
    let (tp, tq) = tv
        .pair()
        .ok_or_else(|| pre("target pair must be of type 1"))?;
    let (pp, qq) = (tv.ac[tp].0.clone(), tv.ac[tq].0.clone());
    let mut xs: Vec<usize> = pp.iter().chain(&qq).copied().collect();
    xs.sort_unstable();
    let v = w.view()?;
    let (gp, gq) = v.pair().ok_or_else(|| pre("pair must be of type 1"))?;
    let mut gs: Vec<usize> = v.ac[gp].0.iter().chain(&v.ac[gq].0).copied().collect();
    gs.sort_unstable();
    w.note("kernel of the left map");
    if gs == xs {
        // pp holds the least point of the merged class.
        for &x in &qq {
            let v = w.view()?;
            if v.aclass(x) == v.aclass(pp[0]) {
                w.step(|v| move_kernel_alpha(v, x))?;
            }
        }
        for &x in &pp {
            let v = w.view()?;
            if v.aclass(x) == v.aclass(qq[0]) {
                w.step(|v| move_kernel_alpha(v, x))?;
            }
        }
    } else {
        let v = w.view()?;
        let c = v.a.at(xs[0]).expect("in domain");
        let ck = v.bclass(c).expect("type 1");
        if v.bc[ck].0.len() < 2 {
            w.enlarge(Some(c), &[])?;
        }
        let v = w.view()?;
        let ck = v.bclass(c).expect("type 1");
        let (p, q) = (v.bc[ck].0[0], v.bc[ck].0[1]);
        let k = v.aclass(xs[0]).expect("in domain");
        w.step(|v| split_merge(v, k, &pp, p, q))?;
    }
    w.note("image of the left map");
    for (cls, t) in &tv.ac {
        set_image(w, cls[0], *t)?;
    }
    eq_right(w, &tv)
}

fn eq_type_two(w: &mut Walk, ta: Pm, tb: Pm) -> Result<()> {
    let tv = View::new(w.fam, ta, tb)?;
    let o = tv
        .outside()
        .ok_or_else(|| pre("target pair must be of type 2"))?;
    w.note("images of dom αβ");
    for (k, (cls, t)) in tv.ac.iter().enumerate() {
        if k != o {
            set_image(w, cls[0], *t)?;
        }
    }
    w.note("image of A_(r+1)");
    let t = tv.ac[o].1;
    let v = w.view()?;
    if v.in_dom_b(t) && v.ac[v.outside().expect("type 2")].1 != t {
        let f = v.free();
        if v.bclass(t) == Some(f) && v.bc[f].0.len() == 1 {
            w.enlarge(Some(t), &[t])?;
        }
        w.step(|v| right_move(v, t, None))?;
    }
    w.step(|v| out_image(v, t))?;
    w.note("domain of A_(r+1)");
    for &x in &tv.ac[o].0 {
        if w.a.at(x).is_none() {
            let target = (w.a.with(x, Some(t)), w.b);
            w.step_back(target, |v| drop_point(v, x))?;
        }
    }
    let v = w.view()?;
    let cur = v.ac[v.outside().expect("type 2")].0.clone();
    for x in cur.into_iter().filter(|x| !tv.ac[o].0.contains(x)) {
        w.step(|v| drop_point(v, x))?;
    }
    eq_right(w, &tv)
}

/// Switches a type-2 pair to type 1, splitting the class of `x` as
/// `part`/rest when given.
fn to_type_one(w: &mut Walk, part: Option<(Vec<usize>, usize)>) -> Result<()> {
    let v = w.view()?;
    let o = v.outside().expect("type 2");
    let (part, x) = match part {
        Some(p) => p,
        None => {
            let k = (0..v.ac.len())
                .find(|&k| k != o && v.ac[k].0.len() >= 2)
                .ok_or_else(|| pre("switch needs a class with |A_i| ≥ 2"))?;
            (vec![v.ac[k].0[0]], v.ac[k].0[0])
        }
    };
    let c = v.a.at(x).expect("in domain");
    let ck = v.bclass(c).expect("dom αβ");
    if v.bc[ck].0.len() < 2 {
        w.enlarge(Some(c), &[])?;
    }
    let v = w.view()?;
    let ck = v.bclass(c).expect("dom αβ");
    let (p, q) = (v.bc[ck].0[0], v.bc[ck].0[1]);
    let k = v.aclass(x).expect("in domain");
    w.step(|v| switch(v, k, &part, p, q))
}

fn validate_fam_r(fam: Family, r: usize) -> Result<()> {
    if fam == Family::T && r == 0 {
        return Err(pre("T has no rank-0 elements"));
    }
    Ok(())
}

/// A derivation of `x_α x_β` from `x_γ x_δ`, window `[r+1, r+2]`.
pub fn equalize_pairs(
    fam: Family,
    alpha: &Pm,
    beta: &Pm,
    gamma: &Pm,
    delta: &Pm,
    r: usize,
) -> Result<Derivation> {
    validate_fam_r(fam, r)?;
    let tv = View::new(fam, *alpha, *beta)?;
    let sv = View::new(fam, *gamma, *delta)?;
    if tv.r != r || sv.r != r {
        return Err(pre(format!("letters must have rank r + 1 = {}", r + 1)));
    }
    if alpha.then(beta) != gamma.then(delta) {
        return Err(pre("αβ and γδ differ"));
    }
    let mut w = Walk::new(fam, *gamma, *delta, r);
    match fam {
        Family::I => eq_i(&mut w, *alpha, *beta)?,
        Family::T => eq_type_one(&mut w, *alpha, *beta)?,
        Family::PT => match (sv.type_one(), tv.type_one()) {
            (true, true) => eq_type_one(&mut w, *alpha, *beta)?,
            (false, false) => eq_type_two(&mut w, *alpha, *beta)?,
            (false, true) => {
                w.note("switch the start pair");
                let (i, _) = tv.pair().expect("type 1");
                let part = tv.ac[i].0.clone();
                let x = part[0];
                to_type_one(&mut w, Some((part, x)))?;
                eq_type_one(&mut w, *alpha, *beta)?;
            }
            (true, false) => {
                let mut back = Walk::new(fam, *alpha, *beta, r);
                to_type_one(&mut back, None)?;
                eq_type_one(&mut w, back.a, back.b)?;
                w.note("switch the target pair, read backwards");
                let rev = back.d.reversed();
                w.push(*alpha, *beta, &rev)?;
            }
        },
    }
    if (w.a, w.b) != (*alpha, *beta) {
        return Err(Error::Rejected(
            "equalisation did not reach the target pair".into(),
        ));
    }
    check(&w.d).map_err(|e| Error::Rejected(format!("equalisation: {e}")))?;
    Ok(w.d)
}

// ---------------------------------------------------------------------------
// Length three, and letters of higher rank

fn check_range(spec: &IdealSpec, r: usize) -> Result<()> {
    validate_fam_r(spec.fam, r)?;
    let (n, m) = (spec.n as isize, spec.m as isize);
    if r as isize > 2 * m - n - 1 {
        return Err(pre(format!(
            "need r ≤ 2m - n - 1 = {}; got r = {r}",
            2 * m - n - 1
        )));
    }
    if r as isize + 3 > n {
        return Err(pre(format!(
            "the constructions need r + 3 ≤ n; got r = {r}, n = {n}"
        )));
    }
    Ok(())
}

/// Some `α′ ∈ J_{r+1}` with `α′γ = σ`, least choice first.
fn left_factor(fam: Family, sigma: &Pm, gamma: &Pm, r: usize) -> Option<Pm> {
    let n = sigma.n();
    let fiber = |y: usize| -> Vec<usize> { gamma.preimage(y) };
    let mut base = Pm::empty(n);
    let classes = classes(sigma);
    for (cls, y) in &classes {
        let z = *fiber(*y).first()?;
        base = assign(base, cls.iter().copied(), Some(z));
    }
    let extend = || {
        let x = (1..=n).find(|&x| sigma.at(x).is_none())?;
        let y = (1..=n).find(|&y| gamma.at(y).is_none())?;
        Some(base.with(x, Some(y)))
    };
    let split = || {
        classes.iter().find_map(|(cls, y)| {
            let fb = fiber(*y);
            (cls.len() >= 2 && fb.len() >= 2)
                .then(|| assign(base, cls[1..].iter().copied(), Some(fb[1])))
        })
    };
    let cand = match fam {
        Family::I => extend(),
        Family::T => split(),
        Family::PT => extend().or_else(split),
    }?;
    (cand.member(fam) && cand.rank() == r + 1 && cand.then(gamma) == *sigma).then_some(cand)
}

/// The length-three step: `x_α x_β x_γ` becomes a pair of rank-`r+1` letters,
/// ending in `x_γ` whenever some `α′ ∈ J_{r+1}` has `α′γ = αβγ`.
pub(crate) fn triple_step(fam: Family, alpha: &Pm, beta: &Pm, gamma: &Pm, r: usize) -> Result<Out> {
    let v = View::new(fam, *alpha, *beta)?;
    let gv = View::new(fam, *beta, *gamma)?;
    if v.r != r || gv.r != r || gamma.rank() != r + 1 {
        return Err(pre(format!("letters must have rank r + 1 = {}", r + 1)));
    }
    let sigma = alpha.then(beta).then(gamma);
    if sigma.rank() != r {
        return Err(pre("αβγ must lie in J_r"));
    }
    let hit = sigma.image_mask();
    let b = v
        .points()
        .find(|&x| gamma.at(x).is_some_and(|y| !bit(hit, y)))
        .expect("γ has rank r + 1");
    let (a1, b1, d1) = match fam {
        Family::I => i_im_beta(&v, b)?,
        _ => free_image(&v, b)?,
    };
    let mut bld = Builder::new(vec![*alpha, *beta, *gamma], (r + 1, r + 2));
    bld.note("length three");
    bld.splice(0, &d1)?;
    bld.contract(1)?;
    let bg = b1.then(gamma);
    let Some(ap) = left_factor(fam, &sigma, gamma, r) else {
        bld.note("no left factor of γ in J_(r+1); stop at the contracted pair");
        let d = bld.finish();
        check(&d).map_err(|e| Error::Rejected(format!("length three: {e}")))?;
        return Ok((a1, bg, d));
    };
    let d3 = equalize_pairs(fam, &ap, gamma, &a1, &bg, r)?;
    bld.splice(0, &d3)?;
    let d = bld.finish();
    check(&d).map_err(|e| Error::Rejected(format!("length three: {e}")))?;
    Ok((ap, *gamma, d))
}

/// `x_α x_β x_γ` to `x_{α′} x_{γ′}` with both letters in `J_{r+1}`, window
/// `[r+1, r+2]`. Keeps `γ′ = γ` whenever some `α′ ∈ J_{r+1}` has `α′γ = αβγ`.
pub fn triple_to_pair(
    spec: &IdealSpec,
    alpha: &Pm,
    beta: &Pm,
    gamma: &Pm,
    r: usize,
) -> Result<(Pm, Pm, Derivation)> {
    check_range(spec, r)?;
    for f in [alpha, beta, gamma] {
        if !spec.contains(f) {
            return Err(pre(format!("{f} is not in the ideal {spec}")));
        }
    }
    triple_step(spec.fam, alpha, beta, gamma, r)
}

/// `x_α x_β x_γ` to `x_{α′} x_γ`, window `[r+1, r+2]`.
///
/// In `T_n` and `PT_n` such an `α′` need not exist; see [`triple_to_pair`].
pub fn reduce_triple(
    spec: &IdealSpec,
    alpha: &Pm,
    beta: &Pm,
    gamma: &Pm,
    r: usize,
) -> Result<(Pm, Derivation)> {
    let (ap, g, d) = triple_to_pair(spec, alpha, beta, gamma, r)?;
    if g != *gamma {
        return Err(pre("no α′ ∈ J_(r+1) satisfies α′γ = αβγ"));
    }
    Ok((ap, d))
}

/// `x_γ x_δ → x_γ x_γ1 x_δ → x_γ x_β` with `γγ1 = γ` and `β = γ1δ ∈ J_{r+1}`.
fn shrink_right(fam: Family, gamma: &Pm, delta: &Pm) -> Pm {
    let n = gamma.n();
    let hit = gamma.then(delta).image_mask();
    let p = (1..=n)
        .find(|&x| delta.at(x).is_some_and(|y| !bit(hit, y)))
        .expect("δ has rank above r");
    let im = gamma.image_mask();
    match fam {
        Family::T => Pm::new(
            n,
            &(1..=n)
                .map(|y| Some(if bit(im, y) { y } else { p }))
                .collect::<Vec<_>>(),
        )
        .expect("points in range"),
        _ => Pm::partial_identity(n, gamma.image().into_iter().chain([p])),
    }
}

/// `x_γ x_δ → x_γ x_δ1 x_δ → x_α x_δ` with `δ1δ = δ` and `α = γδ1 ∈ J_{r+1}`.
fn shrink_left(gamma: &Pm, delta: &Pm) -> Pm {
    let n = gamma.n();
    let im = gamma.image_mask();
    let mut d1 = Pm::empty(n);
    let mut extra = None;
    for (cls, _) in classes(delta) {
        let inside: Vec<usize> = cls.iter().copied().filter(|&y| bit(im, y)).collect();
        let rep = inside.first().copied().unwrap_or(cls[0]);
        d1 = assign(d1, cls.iter().copied(), Some(rep));
        if extra.is_none() && inside.len() >= 2 {
            extra = Some(inside[1]);
        }
    }
    let extra = extra
        .or_else(|| (1..=n).find(|&y| bit(im, y) && delta.at(y).is_none()))
        .expect("γ has rank above r");
    d1.with(extra, Some(extra))
}

/// Replaces letters of rank above `r + 1` in `x_γ x_δ` by rank-`r+1`
/// letters, window `[r+1, m]`.
pub fn split_high_rank(spec: &IdealSpec, gamma: &Pm, delta: &Pm, r: usize) -> Result<Out> {
    check_range(spec, r)?;
    let (fam, m) = (spec.fam, spec.m);
    for f in [gamma, delta] {
        if !spec.contains(f) {
            return Err(pre(format!("{f} is not in the ideal {spec}")));
        }
        if f.rank() <= r {
            return Err(pre(format!("{f} has rank at most r = {r}")));
        }
    }
    if gamma.then(delta).rank() != r {
        return Err(pre("γδ must lie in J_r"));
    }
    if gamma.rank() == m && delta.rank() == m {
        return Err(pre("γ and δ cannot both lie in J_m"));
    }
    let mut bld = Builder::new(vec![*gamma, *delta], (r + 1, m));
    let (mut g, mut d) = (*gamma, *delta);
    let right = |bld: &mut Builder, g: &Pm, d: &mut Pm| -> Result<()> {
        let g1 = shrink_right(fam, g, d);
        let nd = g1.then(d);
        bld.note("shrink right: γγ1 = γ");
        bld.path(&[vec![*g, g1, *d], vec![*g, nd]])?;
        *d = nd;
        Ok(())
    };
    let left = |bld: &mut Builder, g: &mut Pm, d: &Pm| -> Result<()> {
        let d1 = shrink_left(g, d);
        let ng = g.then(&d1);
        bld.note("shrink left: δ1δ = δ");
        bld.path(&[vec![*g, d1, *d], vec![ng, *d]])?;
        *g = ng;
        Ok(())
    };
    if g.rank() <= d.rank() {
        bld.note("case rank γ ≤ rank δ");
        if d.rank() > r + 1 {
            right(&mut bld, &g, &mut d)?;
        }
        if g.rank() > r + 1 {
            left(&mut bld, &mut g, &d)?;
        }
    } else {
        bld.note("case rank δ < rank γ");
        left(&mut bld, &mut g, &d)?;
        if d.rank() > r + 1 {
            right(&mut bld, &g, &mut d)?;
        }
    }
    let out = bld.finish();
    check(&out).map_err(|e| Error::Rejected(format!("higher rank: {e}")))?;
    Ok((g, d, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(n: usize, pairs: &[(usize, usize)]) -> Pm {
        Pm::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn i_rule_one_example() {
        let a = Pm::partial_identity(4, [1, 2]);
        let b = pm(4, &[(1, 1), (3, 2)]);
        let (a2, b2, d) = apply_rule(RuleKind::IImAlpha, &a, &b, &point(4)).unwrap();
        assert_eq!(a2, pm(4, &[(1, 1), (2, 4)]));
        assert_eq!(b2, b);
        assert!(check(&d).is_ok());
        assert_eq!(d.window, (2, 3));
    }

    #[test]
    fn identity_choice_gives_empty_derivation() {
        let a = Pm::partial_identity(4, [1, 2]);
        let b = pm(4, &[(1, 1), (3, 2)]);
        let (a2, b2, d) = apply_rule(RuleKind::IImAlpha, &a, &b, &point(2)).unwrap();
        assert_eq!((a2, b2), (a, b));
        assert!(d.is_empty());
    }

    #[test]
    fn equalize_example() {
        let a = Pm::partial_identity(4, [1, 2]);
        let b = pm(4, &[(1, 1), (3, 2)]);
        let g = pm(4, &[(1, 1), (2, 3)]);
        let dl = pm(4, &[(1, 1), (2, 2)]);
        let d = equalize_pairs(Family::I, &a, &b, &g, &dl, 1).unwrap();
        assert_eq!(d.start, vec![g, dl]);
        assert_eq!(d.end, vec![a, b]);
    }

    #[test]
    fn triple_and_split_examples() {
        let spec = IdealSpec::new(Family::I, 4, 3).unwrap();
        let a = Pm::partial_identity(4, [1, 2]);
        let b = pm(4, &[(1, 1), (3, 2)]);
        let g = pm(4, &[(1, 1), (4, 2)]);
        let (ap, d) = reduce_triple(&spec, &a, &b, &g, 1).unwrap();
        assert_eq!(ap.then(&g), pm(4, &[(1, 1)]));
        assert_eq!(d.end, vec![ap, g]);
        let (x, y, d) = split_high_rank(&spec, &Pm::partial_identity(4, [1, 2, 3]), &g, 1).unwrap();
        assert_eq!((x.rank(), y.rank()), (2, 2));
        assert_eq!(x.then(&y), pm(4, &[(1, 1)]));
        assert!(check(&d).is_ok());
    }
}
