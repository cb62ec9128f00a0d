#include "pertlab/limit_model.hpp"

#include <cmath>
#include <sstream>

#include "pertlab/errors.hpp"
#include "pertlab/quadrature.hpp"

namespace pertlab {

namespace {

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

double tri_quantile(double x) {
    return x < 0.5 ? std::sqrt(2.0 * x) - 1.0 : 1.0 - std::sqrt(2.0 * (1.0 - x));
}

// Root in [-1,1] of (3/4)(t - t^3/3) + 1/2 = x, via the trigonometric form of
// the depressed cubic t^3 - 3t + (4x - 2) = 0.
double para_quantile(double x) {
    const double c = std::fmin(1.0, std::fmax(-1.0, 1.0 - 2.0 * x));
    const double phi = std::acos(c) / 3.0;
    double t = 2.0 * std::cos(phi + 4.0 * M_PI / 3.0);
    return std::fmin(1.0, std::fmax(-1.0, t));
}

}  // namespace

ExampleId ExampleId::parse(const std::string& text) {
    ExampleId id;
    std::string name = text;
    std::string args;
    if (auto pos = text.find(':'); pos != std::string::npos) {
        name = text.substr(0, pos);
        args = text.substr(pos + 1);
    }
    if (name == "band")
        id.kind = Kind::UniformBand;
    else if (name == "triangular")
        id.kind = Kind::TriangularWigner;
    else if (name == "parabolic")
        id.kind = Kind::ParabolicWigner;
    else
        throw ParameterError("unknown model '" + name + "' (want band|triangular|parabolic)");

    std::stringstream ss(args);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        if (kv.empty()) continue;
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParameterError("bad model parameter '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const double val = std::stod(kv.substr(eq + 1));
        if (key == "l" || key == "ell")
            id.ell = val;
        else if (key == "m")
            id.m = val;
        else
            throw ParameterError("unknown model parameter '" + key + "'");
    }
    if (id.kind == Kind::UniformBand && !(id.ell > 0.0 && id.ell <= 1.0))
        throw ParameterError("band half-width l must be in (0,1]");
    if (id.m < 0.0) throw ParameterError("diagonal scale m must be >= 0");
    return id;
}

std::string ExampleId::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::UniformBand: os << "band:l=" << ell << ",m=" << m; break;
        case Kind::TriangularWigner: os << "triangular:m=" << m; break;
        case Kind::ParabolicWigner: os << "parabolic:m=" << m; break;
    }
    return os.str();
}

LimitModel make_model(const ExampleId& id) {
    if (id.m < 0.0) throw ParameterError("diagonal scale m must be >= 0");
    LimitModel mdl;
    const double m2 = id.m * id.m;
    mdl.sigma_d2 = [m2](double) { return m2; };

    switch (id.kind) {
        case ExampleId::Kind::UniformBand: {
            const double ell = id.ell;
            if (!(ell > 0.0 && ell <= 1.0)) throw ParameterError("band half-width l must be in (0,1]");
            mdl.f = [](double x) { return x; };
            mdl.rho = [](double t) { return (t > 0.0 && t < 1.0) ? 1.0 : 0.0; };
            mdl.tau = [ell](double s, double t) { return std::abs(t - s) <= ell ? 1.0 : 0.0; };
            mdl.sigma2 = [ell](double x, double y) { return std::abs(y - x) <= ell ? 1.0 : 0.0; };
            mdl.support = {0.0, 1.0};
            mdl.cdf = [](double t) { return std::fmin(1.0, std::fmax(0.0, t)); };
            mdl.rho_kinks = {};
            mdl.tau_kinks = [ell](double s) { return std::vector<double>{s - ell, s + ell}; };
            mdl.holder = {0.05, 1.0, 0.0};  // tau*rho locally constant in the bulk
            break;
        }
        case ExampleId::Kind::TriangularWigner: {
            mdl.f = [](double x) { return tri_quantile(x); };
            mdl.rho = [](double t) { return std::abs(t) <= 1.0 ? 1.0 - std::abs(t) : 0.0; };
            mdl.tau = [](double, double) { return 1.0; };
            mdl.sigma2 = [](double, double) { return 1.0; };
            mdl.support = {-1.0, 1.0};
            mdl.cdf = [](double t) {
                t = std::fmin(1.0, std::fmax(-1.0, t));
                return t < 0.0 ? 0.5 * (1.0 + t) * (1.0 + t) : 1.0 - 0.5 * (1.0 - t) * (1.0 - t);
            };
            mdl.rho_kinks = {0.0};
            mdl.tau_kinks = [](double) { return std::vector<double>{}; };
            mdl.holder = {0.05, 1.0, 1.0};  // |rho'| <= 1
            break;
        }
        case ExampleId::Kind::ParabolicWigner: {
            mdl.f = [](double x) { return para_quantile(x); };
            mdl.rho = [](double t) { return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0; };
            mdl.tau = [](double, double) { return 1.0; };
            mdl.sigma2 = [](double, double) { return 1.0; };
            mdl.support = {-1.0, 1.0};
            mdl.cdf = [](double t) {
                t = std::fmin(1.0, std::fmax(-1.0, t));
                return 0.75 * (t - t * t * t / 3.0) + 0.5;
            };
            mdl.rho_kinks = {};
            mdl.tau_kinks = [](double) { return std::vector<double>{}; };
            mdl.holder = {0.05, 1.0, 1.5};  // max |rho'| = 3/2
            break;
        }
    }
    return mdl;
}

double closed_form_F(const ExampleId& id, double s) {
    switch (id.kind) {
        case ExampleId::Kind::UniformBand: {
            if (s <= 0.0 || s >= 1.0) return 0.0;
            const double ell = id.ell;
            // log((l ^ (1-s)) / (l ^ s)); sign fixed by the Stieltjes identity
            // B(z) = -int F/(z-s)^2 and by the CDF shift -rho*H[tau rho].
            return std::log(std::fmin(ell, 1.0 - s) / std::fmin(ell, s));
        }
        case ExampleId::Kind::TriangularWigner: {
            if (std::abs(s) >= 1.0) return 0.0;
            const double slogs = s != 0.0 ? 2.0 * s * std::log(std::abs(s)) : 0.0;
            return (1.0 - std::abs(s)) * (xlogx(1.0 - s) - xlogx(1.0 + s) + slogs);
        }
        case ExampleId::Kind::ParabolicWigner: {
            if (std::abs(s) >= 1.0) return 0.0;
            const double q = 1.0 - s * s;
            return -9.0 / 16.0 * q * (2.0 * s - q * std::log(std::abs((s - 1.0) / (s + 1.0))));
        }
    }
    return 0.0;
}

double eval_quantile_f(const LimitModel& model, double x) {
    if (x < 0.0 || x > 1.0) throw ParameterError("eval_quantile_f: x must be in [0,1]");
    std::function<double(double)> cdf = model.cdf;
    if (!cdf) {
        const LimitModel* m = &model;
        cdf = [m](double t) {
            if (t <= m->support.lo) return 0.0;
            auto pts = panel_points(m->support.lo, std::fmin(t, m->support.hi), 64, m->rho_kinks,
                                    {m->support.lo, m->support.hi});
            return integrate_panels(m->rho, pts, 16);
        };
    }
    if (std::abs(cdf(model.support.hi) - 1.0) > 1e-6)
        throw ModelError("eval_quantile_f: density does not integrate to 1");
    if (x <= 0.0) return model.support.lo;
    if (x >= 1.0) return model.support.hi;
    double lo = model.support.lo, hi = model.support.hi;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < x)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace pertlab
