//! Dormand–Prince 8(5,3) stepping with the standard Hairer error estimate.
//!
//! Steps are shortened to land exactly on each requested output abscissa, so
//! the returned states carry full step accuracy without interpolation.

use crate::error::{Error, Result};

const C2: f64 = 0.526001519587677318785587544488e-1;
const C3: f64 = 0.789002279381515978178381316732e-1;
const C4: f64 = 0.118350341907227396726757197510;
const C5: f64 = 0.281649658092772603273242802490;
const C6: f64 = 0.333333333333333333333333333333;
const C7: f64 = 0.25;
const C8: f64 = 0.307692307692307692307692307692;
const C9: f64 = 0.651282051282051282051282051282;
const C10: f64 = 0.6;
const C11: f64 = 0.857142857142857142857142857142;

const A21: f64 = 5.26001519587677318785587544488e-2;
const A31: f64 = 1.97250569845378994544595329183e-2;
const A32: f64 = 5.91751709536136983633785987549e-2;
const A41: f64 = 2.95875854768068491816892993775e-2;
const A43: f64 = 8.87627564304205475450678981324e-2;
const A51: f64 = 2.41365134159266685502369798665e-1;
const A53: f64 = -8.84549479328286085344864962717e-1;
const A54: f64 = 9.24834003261792003115737966543e-1;
const A61: f64 = 3.7037037037037037037037037037e-2;
const A64: f64 = 1.70828608729473871279604482173e-1;
const A65: f64 = 1.25467687566822425016691814123e-1;
const A71: f64 = 3.7109375e-2;
const A74: f64 = 1.70252211019544039314978060272e-1;
const A75: f64 = 6.02165389804559606850219397283e-2;
const A76: f64 = -1.7578125e-2;
const A81: f64 = 3.70920001185047927108779319836e-2;
const A84: f64 = 1.70383925712239993810214054705e-1;
const A85: f64 = 1.07262030446373284651809199168e-1;
const A86: f64 = -1.53194377486244017527936158236e-2;
const A87: f64 = 8.27378916381402288758473766002e-3;
const A91: f64 = 6.24110958716075717114429577812e-1;
const A94: f64 = -3.36089262944694129406857109825;
const A95: f64 = -8.68219346841726006818189891453e-1;
const A96: f64 = 2.75920996994467083049415600797e1;
const A97: f64 = 2.01540675504778934086186788979e1;
const A98: f64 = -4.34898841810699588477366255144e1;
const A101: f64 = 4.77662536438264365890433908527e-1;
const A104: f64 = -2.48811461997166764192642586468;
const A105: f64 = -5.90290826836842996371446475743e-1;
const A106: f64 = 2.12300514481811942347288949897e1;
const A107: f64 = 1.52792336328824235832596922938e1;
const A108: f64 = -3.32882109689848629194453265587e1;
const A109: f64 = -2.03312017085086261358222928593e-2;
const A111: f64 = -9.3714243008598732571704021658e-1;
const A114: f64 = 5.18637242884406370830023853209;
const A115: f64 = 1.09143734899672957818500254654;
const A116: f64 = -8.14978701074692612513997267357;
const A117: f64 = -1.85200656599969598641566180701e1;
const A118: f64 = 2.27394870993505042818970056734e1;
const A119: f64 = 2.49360555267965238987089396762;
const A1110: f64 = -3.0467644718982195003823669022;
const A121: f64 = 2.27331014751653820792359768449;
const A124: f64 = -1.05344954667372501984066689879e1;
const A125: f64 = -2.00087205822486249909675718444;
const A126: f64 = -1.79589318631187989172765950534e1;
const A127: f64 = 2.79488845294199600508499808837e1;
const A128: f64 = -2.85899827713502369474065508674;
const A129: f64 = -8.87285693353062954433549289258;
const A1210: f64 = 1.23605671757943030647266201528e1;
const A1211: f64 = 6.43392746015763530355970484046e-1;

const B1: f64 = 5.42937341165687622380535766363e-2;
const B6: f64 = 4.45031289275240888144113950566;
const B7: f64 = 1.89151789931450038304281599044;
const B8: f64 = -5.8012039600105847814672114227;
const B9: f64 = 3.1116436695781989440891606237e-1;
const B10: f64 = -1.52160949662516078556178806805e-1;
const B11: f64 = 2.01365400804030348374776537501e-1;
const B12: f64 = 4.47106157277725905176885569043e-2;

const BHH1: f64 = 0.244094488188976377952755905512;
const BHH2: f64 = 0.733846688281611857341361741547;
const BHH3: f64 = 0.220588235294117647058823529412e-1;

const ER1: f64 = 0.1312004499419488073250102996e-1;
const ER6: f64 = -0.1225156446376204440720569753e1;
const ER7: f64 = -0.4957589496572501915214079952;
const ER8: f64 = 0.1664377182454986536961530415e1;
const ER9: f64 = -0.3503288487499736816886487290;
const ER10: f64 = 0.3341791187130174790297318841;
const ER11: f64 = 0.8192320648511571246570742613e-1;
const ER12: f64 = -0.2235530786388629525884427845e-1;

const SAFE: f64 = 0.9;
const MAX_STEPS: usize = 1_000_000;

/// `y_out = y + h * sum(w_i k_i)`.
fn combine(y: &[f64], h: f64, terms: &[(f64, &[f64])], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        *o = y[i] + h * acc;
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each
/// abscissa of `outputs`, which must be increasing and beyond `t0`.
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], outputs: &[f64], tol: f64) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let span = outputs.last().map_or(0.0, |&e| e - t0);
    if outputs.is_empty() {
        return Ok(Vec::new());
    }
    if span <= 0.0 || outputs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("integration outputs must increase past the start".into()));
    }

    let mut k = vec![vec![0.0; n]; 13];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut y12 = vec![0.0; n];
    rhs(t, &y, &mut k[1]);

    let mut h = (span * 1e-3).max(1e-12);
    let mut steps = 0;
    let mut result = Vec::with_capacity(outputs.len());

    for &target in outputs {
        while target - t > 1e-15 * (1.0 + target.abs()) {
            steps += 1;
            if steps > MAX_STEPS || h < 1e-14 * span {
                return Err(Error::IntegrationFailure { t, step: h });
            }
            let hit = t + h >= target - 1e-13 * span;
            let hs = if hit { target - t } else { h };

            macro_rules! eval {
                ($c:expr, $dst:expr, [$(($w:expr, $i:expr)),*]) => {{
                    combine(&y, hs, &[$(($w, &k[$i])),*], &mut stage);
                    let mut out = std::mem::take(&mut k[$dst]);
                    rhs(t + $c * hs, &stage, &mut out);
                    k[$dst] = out;
                }};
            }
            eval!(C2, 2, [(A21, 1)]);
            eval!(C3, 3, [(A31, 1), (A32, 2)]);
            eval!(C4, 4, [(A41, 1), (A43, 3)]);
            eval!(C5, 5, [(A51, 1), (A53, 3), (A54, 4)]);
            eval!(C6, 6, [(A61, 1), (A64, 4), (A65, 5)]);
            eval!(C7, 7, [(A71, 1), (A74, 4), (A75, 5), (A76, 6)]);
            eval!(C8, 8, [(A81, 1), (A84, 4), (A85, 5), (A86, 6), (A87, 7)]);
            eval!(C9, 9, [(A91, 1), (A94, 4), (A95, 5), (A96, 6), (A97, 7), (A98, 8)]);
            eval!(C10, 10, [(A101, 1), (A104, 4), (A105, 5), (A106, 6), (A107, 7), (A108, 8), (A109, 9)]);
            eval!(
                C11,
                11,
                [(A111, 1), (A114, 4), (A115, 5), (A116, 6), (A117, 7), (A118, 8), (A119, 9), (A1110, 10)]
            );
            combine(
                &y,
                hs,
                &[
                    (A121, &k[1]),
                    (A124, &k[4]),
                    (A125, &k[5]),
                    (A126, &k[6]),
                    (A127, &k[7]),
                    (A128, &k[8]),
                    (A129, &k[9]),
                    (A1210, &k[10]),
                    (A1211, &k[11]),
                ],
                &mut y12,
            );
            let mut k12 = std::mem::take(&mut k[12]);
            rhs(t + hs, &y12, &mut k12);
            k[12] = k12;

            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..n {
                let incr = B1 * k[1][i]
                    + B6 * k[6][i]
                    + B7 * k[7][i]
                    + B8 * k[8][i]
                    + B9 * k[9][i]
                    + B10 * k[10][i]
                    + B11 * k[11][i]
                    + B12 * k[12][i];
                y_new[i] = y[i] + hs * incr;
                let sk = tol + tol * y[i].abs().max(y_new[i].abs());
                let e2 = incr - BHH1 * k[1][i] - BHH2 * k[9][i] - BHH3 * k[12][i];
                err2 += (e2 / sk).powi(2);
                let e1 = ER1 * k[1][i]
                    + ER6 * k[6][i]
                    + ER7 * k[7][i]
                    + ER8 * k[8][i]
                    + ER9 * k[9][i]
                    + ER10 * k[10][i]
                    + ER11 * k[11][i]
                    + ER12 * k[12][i];
                err += (e1 / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = hs.abs() * err * (1.0 / (deno * n as f64)).sqrt();

            let fac11 = err.powf(0.125);
            if err <= 1.0 {
                let fac = (fac11 / SAFE).clamp(1.0 / 6.0, 3.0);
                t = if hit { target } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                let mut k1 = std::mem::take(&mut k[1]);
                rhs(t, &y, &mut k1);
                k[1] = k1;
                let proposal = hs / fac;
                h = if hit { h.max(proposal) } else { proposal };
            } else {
                h = hs / (fac11 / SAFE).min(3.0);
            }
        }
        result.push(y.clone());
    }
    Ok(result)
}
