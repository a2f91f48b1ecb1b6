#include "dslab/dop853.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dslab/errors.hpp"

namespace dslab {

namespace {

constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;
constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;
constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;
constexpr double bhh1 = 0.244094488188976377952755905512e+00;
constexpr double bhh2 = 0.733846688281611857341361741547e+00;
constexpr double bhh3 = 0.220588235294117647058823529412e-01;
constexpr double er1 = 0.1312004499419488073250102996e-01;
constexpr double er6 = -0.1225156446376204440720569753e+01;
constexpr double er7 = -0.4957589496572501915214079952e+00;
constexpr double er8 = 0.1664377182454986536961530415e+01;
constexpr double er9 = -0.3503288487499736816886487290e+00;
constexpr double er10 = 0.3341791187130174790297318841e+00;
constexpr double er11 = 0.8192320648511571246570742613e-01;
constexpr double er12 = -0.2235530786388629525884427845e-01;

struct Work {
    explicit Work(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n), k11(n), k12(n),
          y1(n), ynew(n) {}
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, y1, ynew;
};

double initial_step(const OdeRhs& f, double t, const std::vector<double>& y, const std::vector<double>& f0,
                    double dir, double hmax, const OdeOptions& opt, std::vector<double>& y1,
                    std::vector<double>& f1) {
    const std::size_t n = y.size();
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = opt.atol + opt.rtol * std::abs(y[i]);
        dnf += (f0[i] / sk) * (f0[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, hmax);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + dir * h * f0[i];
    f(t + dir * h, y1.data(), f1.data());
    double der2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = opt.atol + opt.rtol * std::abs(y[i]);
        const double d = (f1[i] - f0[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    return std::min({100.0 * h, h1, hmax});
}

}  // namespace

OdeStats dop853(const OdeRhs& f, double t0, std::vector<double>& y, const std::vector<double>& targets,
                const OdeSink& sink, const OdeOptions& opt) {
    OdeStats st;
    if (targets.empty()) return st;
    const std::size_t n = y.size();
    const double t_end = targets.back();
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < targets.size(); ++i)
        if (dir * (targets[i] - targets[i - 1]) < 0.0)
            throw IntegrationError("dop853: targets are not monotone in the integration direction");

    Work w(n);
    double t = t0;
    std::size_t next = 0;
    while (next < targets.size() && targets[next] == t) sink(next++, y);
    if (next == targets.size()) return st;

    f(t, y.data(), w.k1.data());
    ++st.evals;
    const double hmax = std::abs(t_end - t0);
    double h = opt.h_init > 0.0 ? opt.h_init : initial_step(f, t, y, w.k1, dir, hmax, opt, w.y1, w.k2);
    ++st.evals;
    bool last_rejected = false;

    while (next < targets.size()) {
        if (st.steps + st.rejected >= opt.max_steps) throw IntegrationError("dop853: step budget exhausted");
        const double target = targets[next];
        double hs = h;
        bool hits = false;
        if (dir * (t + dir * hs - target) >= 0.0 || std::abs(target - t - dir * hs) < 1e-12 * std::abs(hs)) {
            hs = std::abs(target - t);
            hits = true;
        }
        const double scale = std::max(std::abs(t), 1e-300);
        if (hs < 1e-14 * scale && !hits) {
            std::ostringstream os;
            os << "step size underflow near tau=" << t
               << "; use a smaller tau_seed or enable the log-time substitution";
            throw IntegrationError(os.str());
        }
        const double hh = dir * hs;
        auto& k1 = w.k1; auto& k2 = w.k2; auto& k3 = w.k3; auto& k4 = w.k4; auto& k5 = w.k5;
        auto& k6 = w.k6; auto& k7 = w.k7; auto& k8 = w.k8; auto& k9 = w.k9; auto& k10 = w.k10;
        auto& k11 = w.k11; auto& k12 = w.k12; auto& y1 = w.y1;

        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + hh * a21 * k1[i];
        f(t + c2 * hh, y1.data(), k2.data());
        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + hh * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * hh, y1.data(), k3.data());
        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + hh * (a41 * k1[i] + a43 * k3[i]);
        f(t + c4 * hh, y1.data(), k4.data());
        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + hh * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * hh, y1.data(), k5.data());
        for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + hh * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + c6 * hh, y1.data(), k6.data());
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(t + c7 * hh, y1.data(), k7.data());
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        f(t + c8 * hh, y1.data(), k8.data());
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
                                 a98 * k8[i]);
        f(t + c9 * hh, y1.data(), k9.data());
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                                 a108 * k8[i] + a109 * k9[i]);
        f(t + c10 * hh, y1.data(), k10.data());
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                                 a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        f(t + c11 * hh, y1.data(), k11.data());
        const double t_new = hits ? target : t + hh;
        for (std::size_t i = 0; i < n; ++i)
            y1[i] = y[i] + hh * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                                 a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i]);
        f(t_new, y1.data(), k12.data());
        st.evals += 11;

        double err = 0.0, err2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                                b11 * k11[i] + b12 * k12[i];
            w.ynew[i] = y[i] + hh * incr;
            const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(w.ynew[i]));
            const double e2 = (incr - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) / sk;
            const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                               er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) / sk;
            err2 += e2 * e2;
            err += e5 * e5;
        }
        double deno = err + 0.01 * err2;
        if (deno <= 0.0) deno = 1.0;
        err = hs * err * std::sqrt(1.0 / (static_cast<double>(n) * deno));
        if (!std::isfinite(err)) throw IntegrationError("dop853: non-finite error estimate");

        double fac = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 8.0) : 6.0;
        fac = std::clamp(fac, 0.333, 6.0);
        if (err <= 1.0) {
            ++st.steps;
            y.swap(w.ynew);
            t = t_new;
            f(t, y.data(), k1.data());
            ++st.evals;
            if (last_rejected) fac = std::min(fac, 1.0);
            last_rejected = false;
            const double h_next = hs * fac;
            h = hits ? std::max(h, h_next) : h_next;
            h = std::min(h, hmax);
            if (hits) {
                sink(next++, y);
                while (next < targets.size() && targets[next] == t) sink(next++, y);
            }
        } else {
            ++st.rejected;
            last_rejected = true;
            h = hs * std::min(fac, 1.0);
        }
    }
    return st;
}

}  // namespace dslab
