// Copyright 2025 The swaplru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace slru {

double RatePoint::stderr_() const {
    if (shots <= 0) return 0.0;
    double q = p_l();
    return std::sqrt(q * (1.0 - q) / static_cast<double>(shots));
}

RatePoint& RatePoint::merge(const RatePoint& o) {
    shots += o.shots;
    failures += o.failures;
    return *this;
}

double rule_of_three(int64_t shots) { return shots > 0 ? 3.0 / static_cast<double>(shots) : 1.0; }

std::vector<double> log_window(double p_ref, int count, double lo, double hi) {
    std::vector<double> out;
    for (int i = 0; i < count; i++) {
        double e = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
        out.push_back(p_ref * std::pow(10.0, e));
    }
    return out;
}

std::string FitResult::to_text() const {
    std::ostringstream out;
    out << "ok=" << (ok ? 1 : 0) << "\n";
    if (!message.empty()) out << "message=" << message << "\n";
    if (p_th != 0.0) {
        out << "p_th=" << p_th << "\np_th_err=" << p_th_err << "\nnu=" << nu << "\nnu_err=" << nu_err << "\nA=" << a
            << "\nB=" << b << "\nC=" << c << "\nchi2=" << chi2 << "\n";
    }
    if (used > 0) out << "slope=" << slope << "\nslope_err=" << slope_err << "\nintercept=" << intercept << "\n";
    out << "points=" << used << "\n";
    for (const auto& w : warnings) out << "warning=" << w << "\n";
    return out.str();
}

namespace {

struct Obs {
    double p, d, y, sigma;
};

// Weighted linear fit of A, B, C at fixed (p_th, nu); returns chi^2.
double quad_fit(const std::vector<Obs>& obs, double pth, double nu, Eigen::Vector3d* coef) {
    Eigen::MatrixXd X(obs.size(), 3);
    Eigen::VectorXd y(obs.size());
    for (size_t i = 0; i < obs.size(); i++) {
        double x = (obs[i].p - pth) * std::pow(obs[i].d, 1.0 / nu);
        double w = 1.0 / obs[i].sigma;
        X(i, 0) = w;
        X(i, 1) = w * x;
        X(i, 2) = w * x * x;
        y(i) = w * obs[i].y;
    }
    Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
    if (coef) *coef = c;
    return (X * c - y).squaredNorm();
}

}  // namespace

FitResult fit_threshold(const std::vector<RatePoint>& points) {
    FitResult r;
    std::set<int> ds;
    std::set<double> ps;
    std::vector<Obs> obs;
    for (const auto& pt : points) {
        if (pt.shots <= 0) continue;
        ds.insert(pt.d);
        ps.insert(pt.p);
        double y = pt.p_l();
        // Floor the error bar so empty or saturated cells keep a finite weight.
        double floor = 1.0 / static_cast<double>(pt.shots);
        double s = std::max(pt.stderr_(), floor);
        obs.push_back({pt.p, static_cast<double>(pt.d), y, s});
    }
    r.used = static_cast<int>(obs.size());
    if (ds.size() < 3 || ps.size() < 4) {
        r.message = "need at least 3 distances and 4 error rates";
        return r;
    }
    // Deterministic order independent of input order.
    std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) {
        return std::tie(a.d, a.p, a.y, a.sigma) < std::tie(b.d, b.p, b.y, b.sigma);
    });
    double plo = *ps.begin(), phi = *ps.rbegin();
    double nlo = 0.5, nhi = 2.0;
    const int G = 60;
    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    for (int i = 0; i <= G; i++) {
        double pth = plo + (phi - plo) * i / G;
        for (int j = 0; j <= G; j++) {
            double nu = nlo + (nhi - nlo) * j / G;
            double c2 = quad_fit(obs, pth, nu, nullptr);
            if (c2 < best) {
                best = c2;
                bi = i;
                bj = j;
            }
        }
    }
    if (bi == 0 || bi == G) {
        r.message = "no crossing inside the sampled error rates";
        return r;
    }
    if (bj == 0 || bj == G) r.warnings.push_back("scaling exponent at the edge of [0.5, 2]");
    // Local refinement by shrinking grids.
    double pth = plo + (phi - plo) * bi / G, nu = nlo + (nhi - nlo) * bj / G;
    double hp = (phi - plo) / G, hn = (nhi - nlo) / G;
    for (int level = 0; level < 8; level++) {
        double bp = pth, bn = nu;
        for (int i = -10; i <= 10; i++) {
            for (int j = -10; j <= 10; j++) {
                double tp = pth + hp * i / 10.0, tn = std::clamp(nu + hn * j / 10.0, nlo, nhi);
                double c2 = quad_fit(obs, tp, tn, nullptr);
                if (c2 < best) {
                    best = c2;
                    bp = tp;
                    bn = tn;
                }
            }
        }
        pth = bp;
        nu = bn;
        hp /= 5.0;
        hn /= 5.0;
    }
    Eigen::Vector3d coef;
    r.chi2 = quad_fit(obs, pth, nu, &coef);
    r.p_th = pth;
    r.nu = nu;
    r.a = coef(0);
    r.b = coef(1);
    r.c = coef(2);

    // Covariance from the Jacobian of the weighted residuals.
    Eigen::VectorXd theta(5);
    theta << coef(0), coef(1), coef(2), pth, nu;
    auto resid = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd out(obs.size());
        for (size_t i = 0; i < obs.size(); i++) {
            double x = (obs[i].p - t(3)) * std::pow(obs[i].d, 1.0 / t(4));
            out(i) = (t(0) + t(1) * x + t(2) * x * x - obs[i].y) / obs[i].sigma;
        }
        return out;
    };
    Eigen::MatrixXd J(obs.size(), 5);
    for (int k = 0; k < 5; k++) {
        double h = std::max(1e-7, std::fabs(theta(k)) * 1e-6);
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += h;
        tm(k) -= h;
        J.col(k) = (resid(tp) - resid(tm)) / (2.0 * h);
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    int dof = static_cast<int>(obs.size()) - 5;
    double s2 = dof > 0 ? r.chi2 / dof : 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
    if (!lu.isInvertible()) {
        r.message = "singular fit covariance";
        return r;
    }
    Eigen::MatrixXd cov = lu.inverse() * std::max(s2, 1.0);
    r.p_th_err = std::sqrt(std::max(0.0, cov(3, 3)));
    r.nu_err = std::sqrt(std::max(0.0, cov(4, 4)));
    r.ok = true;
    return r;
}

FitResult fit_distance(const std::vector<RatePoint>& points, double p_ref) {
    FitResult r;
    std::vector<std::pair<double, double>> xy;
    for (const auto& pt : points) {
        if (pt.failures <= 0.0) {
            std::ostringstream w;
            w << "p=" << pt.p << " has no failures in " << pt.shots << " shots (95% bound " << rule_of_three(pt.shots)
              << "); excluded";
            r.warnings.push_back(w.str());
            continue;
        }
        xy.push_back({std::log(pt.p / p_ref), std::log(pt.p_l())});
    }
    std::sort(xy.begin(), xy.end());
    r.used = static_cast<int>(xy.size());
    if (xy.size() < 3) {
        r.message = "fewer than 3 usable points";
        return r;
    }
    double n = static_cast<double>(xy.size());
    double mx = 0, my = 0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx <= 0.0) {
        r.message = "all points share one error rate";
        return r;
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double sse = 0;
    for (auto [x, y] : xy) {
        double e = y - (r.intercept + r.slope * x);
        sse += e * e;
    }
    r.slope_err = xy.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    r.ok = true;
    return r;
}

}  // namespace slru
