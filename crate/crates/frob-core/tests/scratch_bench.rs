use std::time::Instant;
use frob_core::families::{FamilySpec, FamilyTag};
use frob_core::fx;
use frob_core::ct::{differentiate, RationalTermSum, RationalTerm, LaurentPoly};
use frob_core::series::{series_t_over_one_minus_exp, TruncatedSeries};
use frob_core::numeric::{rat, ratio, factorial, binomial_usize};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use num_integer::Integer;

#[test]
fn scratch_bench() {
    let spec = FamilySpec::new(FamilyTag::A2j, &[("a", 25), ("h", 3), ("d", 2), ("j", 6)]).unwrap();
    let f = fx::fx_family(&spec).unwrap();
    let mut fd = vec![f.clone()];
    for _ in 0..3 { fd.push(differentiate(fd.last().unwrap())); }
    let inv = RationalTermSum::from_term(RationalTerm::new(LaurentPoly::one(), vec![BigInt::from(25)]).unwrap());
    let mut invd = vec![inv.clone()];
    for _ in 0..3 { invd.push(differentiate(invd.last().unwrap())); }
    let mut g3 = RationalTermSum::from_term(RationalTerm::new(LaurentPoly::monomial(BigInt::from(0), ratio(6,1)), vec![BigInt::from(1); 4]).unwrap());
    for i in 0..=3usize {
        let c = rat(&binomial_usize(3, i));
        g3 = g3.add(&invd[i].mul(&fd[3-i]).scale(&-c));
    }
    let n = 200u32;

    let mut t_num = std::time::Duration::ZERO;
    let mut t_prod = std::time::Duration::ZERO;
    let mut t_conv = std::time::Duration::ZERO;
    let t_all = Instant::now();
    for _ in 0..n {
        let mut fact_cache: std::collections::HashMap<(BigInt, usize), TruncatedSeries> = Default::default();
        for term in g3.terms() {
            let m = term.denominators().len();
            let order = m;
            let t0 = Instant::now();
            let mut p = TruncatedSeries::one(order);
            for b in term.denominators() {
                let s = fact_cache.entry((b.clone(), order)).or_insert_with(|| series_t_over_one_minus_exp(b, order).unwrap());
                p = p.mul(s);
            }
            t_prod += t0.elapsed();
            let t0 = Instant::now();
            let mut d_raw = vec![BigInt::zero(); order + 1];
            for (e, c) in term.numerator().terms() {
                let scale = c.to_integer();
                let mut epow = BigInt::one();
                for (k, slot) in d_raw.iter_mut().enumerate() {
                    *slot += &scale * &epow;
                    if k < order { epow *= e; }
                }
            }
            let d = TruncatedSeries::new(0, d_raw.into_iter().enumerate().map(|(k, v)| BigRational::new(v, factorial(k))).collect());
            t_num += t0.elapsed();
            let t0 = Instant::now();
            let product = d.mul(&p);
            std::hint::black_box(product.coeff(m as i64));
            t_conv += t0.elapsed();
        }
    }
    println!("total replicated: {:?}/iter", t_all.elapsed()/n);
    println!("  denominator products: {:?}/iter", t_prod/n);
    println!("  numerator series: {:?}/iter", t_num/n);
    println!("  final conv: {:?}/iter", t_conv/n);
}
