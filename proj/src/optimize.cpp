#include "snl/optimize.hpp"

#include <cmath>
#include <limits>

namespace snl {

namespace {

double safe(const Objective& f, const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

std::vector<double> gradient(const Objective& f, std::vector<double> x, double f0, double step) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * (1.0 + std::abs(x[i]));
        const double xi = x[i];
        x[i] = xi + h;
        const double up = safe(f, x);
        x[i] = xi - h;
        const double down = safe(f, x);
        x[i] = xi;
        if (std::isfinite(up) && std::isfinite(down))
            g[i] = (up - down) / (2.0 * h);
        else if (std::isfinite(up))
            g[i] = (up - f0) / h;
        else if (std::isfinite(down))
            g[i] = (f0 - down) / h;
        else
            g[i] = 0.0;
    }
    return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0, const MinimizeOptions& options) {
    const std::size_t n = x0.size();
    MinimizeResult result;
    result.x = std::move(x0);
    result.value = safe(f, result.x);
    if (n == 0) {
        result.converged = std::isfinite(result.value);
        return result;
    }
    if (!std::isfinite(result.value)) return result;

    // inverse Hessian approximation, row-major
    std::vector<double> H(n * n, 0.0);
    auto reset = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    };
    reset();

    std::vector<double> g = gradient(f, result.x, result.value, options.gradient_step);
    std::vector<double> dir(n), x_new(n), s(n), y(n), Hy(n);
    int stalls = 0;

    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it + 1;
        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::abs(v));
        if (gnorm < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v -= H[i * n + j] * g[j];
            dir[i] = v;
        }
        double slope = dot(dir, g);
        if (slope >= 0.0) {
            reset();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
            slope = dot(dir, g);
        }

        double step = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = result.x[i] + step * dir[i];
            f_new = safe(f, x_new);
            if (f_new <= result.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // steepest descent already failed: treat as converged at numerical precision
            bool was_identity = true;
            for (std::size_t i = 0; i < n && was_identity; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (H[i * n + j] != (i == j ? 1.0 : 0.0)) { was_identity = false; break; }
            if (was_identity) {
                result.converged = gnorm < 1e-3;
                break;
            }
            reset();
            continue;
        }

        const double change = result.value - f_new;
        std::vector<double> g_new = gradient(f, x_new, f_new, options.gradient_step);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - result.x[i];
            y[i] = g_new[i] - g[i];
        }
        result.x = x_new;
        result.value = f_new;
        g = std::move(g_new);

        if (change <= options.value_tolerance * (1.0 + std::abs(f_new))) {
            if (++stalls >= 3) {
                result.converged = true;
                break;
            }
        } else {
            stalls = 0;
        }

        const double sy = dot(s, y);
        if (sy <= 1e-14) continue;
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += H[i * n + j] * y[j];
            Hy[i] = v;
        }
        const double yHy = dot(y, Hy);
        const double a = (1.0 + yHy / sy) / sy;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                H[i * n + j] += a * s[i] * s[j] - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
    }
    return result;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    double best = 0.5 * (a + b);
    double fb = f(best);
    if (f(lo) < fb) { best = lo; fb = f(lo); }
    if (f(hi) < fb) best = hi;
    return best;
}

}  // namespace snl
