// Copyright 2026 The macroent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "macroent/scaling.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "macroent/correlation.h"
#include "macroent/observables.h"

namespace macroent {

namespace {

const std::vector<std::string> kFamilies = {"cat", "psi1", "psi2", "ex1", "ex2", "ex3", "ex3random",
                                            "ex2prime", "ex3prime", "product", "random"};

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

LineFit least_squares(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) {
        throw std::invalid_argument("fit: all N values are equal");
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy == 0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return f;
}

std::vector<const SweepPoint *> good_points(const std::vector<SweepPoint> &points) {
    std::vector<const SweepPoint *> out;
    for (const auto &p : points) {
        if (p.ok()) {
            out.push_back(&p);
        }
    }
    return out;
}

}  // namespace

MixedState StateFamily::make(int n) const {
    if (name == "cat") return make_cat(n);
    if (name == "psi1") return make_psi1(n);
    if (name == "psi2") return make_psi2(n);
    if (name == "ex1") return make_ex1(n);
    if (name == "ex2") return make_ex2_ensemble(n);
    if (name == "ex3") return make_ex3_ensemble(n);
    if (name == "ex3random") return make_ex3_random_ensemble(n, seed);
    if (name == "ex2prime") return mix(make_ex2_ensemble(n), make_ex1(n), w);
    if (name == "ex3prime") return mix(make_ex3_ensemble(n), make_ex1(n), w);
    if (name == "product") return make_product(n, seed);
    if (name == "random") return make_random_state(n);
    throw std::invalid_argument("unknown state family '" + name + "'");
}

bool StateFamily::is_pure() const {
    return name == "cat" || name == "psi1" || name == "psi2" || name == "product";
}

std::optional<double> StateFamily::expected_index() const {
    if (name == "cat" || name == "psi2" || name == "ex2" || name == "ex3" || name == "ex3random") return 2.0;
    if (name == "ex2prime" || name == "ex3prime") return w > 0 ? 2.0 : 1.0;
    if (name == "psi1" || name == "ex1" || name == "product" || name == "random") return 1.0;
    return std::nullopt;
}

const std::vector<std::string> &family_names() {
    return kFamilies;
}

StateFamily parse_family(const std::string &spec, double default_w, std::uint64_t default_seed) {
    StateFamily f;
    f.w = default_w;
    f.seed = default_seed;
    auto open = spec.find('(');
    f.name = spec.substr(0, open);
    if (std::find(kFamilies.begin(), kFamilies.end(), f.name) == kFamilies.end()) {
        throw std::invalid_argument("unknown state family '" + f.name + "'");
    }
    if (open != std::string::npos) {
        auto close = spec.find(')', open);
        if (close == std::string::npos || close != spec.size() - 1) {
            throw std::invalid_argument("malformed state spec '" + spec + "'");
        }
        std::string arg = spec.substr(open + 1, close - open - 1);
        try {
            if (f.name == "ex2prime" || f.name == "ex3prime") {
                f.w = std::stod(arg);
            } else if (f.name == "product" || f.name == "ex3random") {
                f.seed = std::stoull(arg);
            } else {
                throw std::invalid_argument("takes no parameter");
            }
        } catch (const std::exception &) {
            throw std::invalid_argument("bad parameter in state spec '" + spec + "'");
        }
    }
    if (!(f.w >= 0 && f.w <= 1)) {
        throw std::invalid_argument("mixing weight must lie in [0, 1]");
    }
    return f;
}

SweepMode parse_sweep_mode(const std::string &name) {
    if (name == "optimized") return SweepMode::Optimized;
    if (name == "canonical") return SweepMode::Canonical;
    if (name == "variance" || name == "p") return SweepMode::Variance;
    throw std::invalid_argument("unknown sweep mode '" + name + "' (optimized, canonical, variance)");
}

std::string to_string(SweepMode mode) {
    switch (mode) {
        case SweepMode::Optimized: return "optimized";
        case SweepMode::Canonical: return "canonical";
        case SweepMode::Variance: return "variance";
    }
    return "?";
}

double canonical_value(const MixedState &s) {
    auto mz = AdditiveObservable::magnetization(s.n_sites());
    if (s.is_ensemble() && !s.as_pure()) {
        return c_expectation(mz, component_projector(s), s);
    }
    return eta_optimal(mz, s).value;
}

std::vector<SweepPoint> sweep(
    const StateFamily &family, const std::vector<int> &n_values, const OptimizerConfig &cfg, SweepMode mode) {
    if (!std::is_sorted(n_values.begin(), n_values.end())) {
        throw std::invalid_argument("sweep: N values must be ascending");
    }
    std::vector<SweepPoint> points;
    for (int n : n_values) {
        SweepPoint p;
        p.n = n;
        auto start = std::chrono::steady_clock::now();
        try {
            MixedState s = family.make(n);
            switch (mode) {
                case SweepMode::Optimized: {
                    Optimum o = maximize_c(s, cfg);
                    p.raw_value = o.value;
                    p.optimum = std::move(o);
                    break;
                }
                case SweepMode::Canonical:
                    p.raw_value = canonical_value(s);
                    break;
                case SweepMode::Variance: {
                    auto pure = s.as_pure();
                    if (!pure) {
                        throw std::invalid_argument("variance mode needs a pure state family");
                    }
                    Optimum o = maximize_variance(*pure, cfg);
                    p.raw_value = o.value;
                    p.optimum = std::move(o);
                    break;
                }
            }
            p.effective_value = std::max(p.raw_value, static_cast<double>(n));
        } catch (const std::exception &ex) {
            p.error = ex.what();
            p.raw_value = std::numeric_limits<double>::quiet_NaN();
            p.effective_value = std::numeric_limits<double>::quiet_NaN();
        }
        p.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        points.push_back(std::move(p));
    }
    return points;
}

IndexFit fit_index(const std::vector<SweepPoint> &points) {
    auto good = good_points(points);
    if (good.size() < 3) {
        throw std::invalid_argument("fit_index: need at least 3 successful points, got " + std::to_string(good.size()));
    }
    std::vector<double> x, y;
    for (const auto *p : good) {
        if (!(p->effective_value > 0)) {
            throw std::invalid_argument("fit_index: effective values must be positive");
        }
        x.push_back(std::log(static_cast<double>(p->n)));
        y.push_back(std::log(p->effective_value));
    }
    LineFit f = least_squares(x, y);
    IndexFit out;
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.r_squared = f.r_squared;
    out.terminal_secant = secant_slopes(points).back();
    out.points = points;
    return out;
}

std::vector<double> secant_slopes(const std::vector<SweepPoint> &points) {
    auto good = good_points(points);
    std::vector<double> out;
    for (std::size_t i = 1; i < good.size(); ++i) {
        out.push_back(std::log(good[i]->effective_value / good[i - 1]->effective_value) /
                      std::log(static_cast<double>(good[i]->n) / good[i - 1]->n));
    }
    return out;
}

std::vector<double> running_slopes(const std::vector<SweepPoint> &points) {
    std::vector<double> out;
    std::vector<double> x, y;
    for (const auto &p : points) {
        if (!p.ok()) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        x.push_back(std::log(static_cast<double>(p.n)));
        y.push_back(std::log(p.effective_value));
        out.push_back(x.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : least_squares(x, y).slope);
    }
    return out;
}

std::vector<int> parse_n_range(const std::string &text) {
    std::vector<int> out;
    auto fail = [&] { return std::invalid_argument("bad N range '" + text + "' (use a:b:step or a,b,c)"); };
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<int> parts;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ':')) {
                std::size_t used = 0;
                parts.push_back(std::stoi(item, &used));
                if (used != item.size()) throw fail();
            }
            if (parts.size() < 2 || parts.size() > 3) throw fail();
            int step = parts.size() == 3 ? parts[2] : 1;
            if (step < 1 || parts[1] < parts[0]) throw fail();
            for (int n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                std::size_t used = 0;
                out.push_back(std::stoi(item, &used));
                if (used != item.size()) throw fail();
            }
        }
    } catch (const std::invalid_argument &) {
        throw fail();
    } catch (const std::out_of_range &) {
        throw fail();
    }
    if (out.empty() || !std::is_sorted(out.begin(), out.end()) || out.front() < 1) {
        throw fail();
    }
    return out;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

void write_sweep_csv(
    std::ostream &out, const std::vector<SweepPoint> &points, std::uint64_t seed, int restarts, bool include_wall_time) {
    out << "n,raw_value,effective_value,slope_running,seed,restarts";
    if (include_wall_time) {
        out << ",wall_time_s";
    }
    out << '\n';
    auto running = running_slopes(points);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto &p = points[i];
        out << p.n << ',' << format_number(p.raw_value) << ',' << format_number(p.effective_value) << ','
            << format_number(running[i]) << ',' << seed << ',' << restarts;
        if (include_wall_time) {
            out << ',' << format_number(p.wall_time);
        }
        out << '\n';
    }
}

}  // namespace macroent
