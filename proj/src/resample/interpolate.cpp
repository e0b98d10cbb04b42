#include "seilab/resample/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seilab {

double target_rate(int factor, double f_low_hz) {
    if (factor < 1) throw std::invalid_argument("target_rate: V must be >= 1, got " + std::to_string(factor));
    if (!(f_low_hz > 0.0)) throw std::invalid_argument("target_rate: F_L must be positive");
    return factor * f_low_hz;
}

KnotGrid KnotGrid::uniform(std::span<const cplx> values) {
    KnotGrid g;
    g.values.assign(values.begin(), values.end());
    g.tau.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) g.tau[i] = static_cast<double>(i);
    return g;
}

void KnotGrid::validate(std::size_t min_knots) const {
    if (tau.size() != values.size()) throw std::invalid_argument("KnotGrid: tau/values length mismatch");
    if (tau.size() < min_knots)
        throw std::invalid_argument("KnotGrid: need at least " + std::to_string(min_knots) + " knots, got " +
                                    std::to_string(tau.size()));
    for (std::size_t i = 1; i < tau.size(); ++i)
        if (!(tau[i] > tau[i - 1])) throw std::invalid_argument("KnotGrid: tau must be strictly increasing");
}

cplx SplinePiece::value(double t) const {
    const double u = t - left;
    return coeffs[0] + u * (coeffs[1] + u * (coeffs[2] + u * coeffs[3]));
}

cplx SplinePiece::derivative(double t) const {
    const double u = t - left;
    return coeffs[1] + u * (2.0 * coeffs[2] + u * 3.0 * coeffs[3]);
}

std::vector<cplx> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                    std::span<const double> sup, std::span<const cplx> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    std::vector<cplx> d(n);
    c[0] = n > 1 ? sup[0] / diag[0] : 0.0;
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double piv = diag[i] - sub[i] * c[i - 1];
        c[i] = i + 1 < n ? sup[i] / piv : 0.0;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    std::vector<cplx> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

CubicSpline::CubicSpline(KnotGrid grid) : grid_(std::move(grid)) {
    grid_.validate(4);
    const std::size_t n = grid_.tau.size();
    std::vector<double> h(n - 1);
    std::vector<cplx> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = grid_.tau[i + 1] - grid_.tau[i];
        delta[i] = (grid_.values[i + 1] - grid_.values[i]) / h[i];
    }

    std::vector<double> sub(n), diag(n), sup(n);
    std::vector<cplx> rhs(n);
    // Not-a-knot rows: third-derivative continuity at tau_2 (and tau_{n-1}),
    // with the neighbouring interior row folded in to keep the system tridiagonal.
    const double l = h[0] + h[1];
    diag[0] = h[1];
    sup[0] = l;
    rhs[0] = ((2.0 * h[1] + 3.0 * h[0]) * h[1] * delta[0] + h[0] * h[0] * delta[1]) / l;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        sub[i] = h[i];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i - 1];
        rhs[i] = 3.0 * (h[i] * delta[i - 1] + h[i - 1] * delta[i]);
    }
    const double r = h[n - 2] + h[n - 3];
    sub[n - 1] = r;
    diag[n - 1] = h[n - 3];
    rhs[n - 1] = (h[n - 2] * h[n - 2] * delta[n - 3] + (2.0 * h[n - 3] + 3.0 * h[n - 2]) * h[n - 3] * delta[n - 2]) / r;

    slopes_ = solve_tridiagonal(sub, diag, sup, rhs);

    pieces_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto& p = pieces_[i];
        p.left = grid_.tau[i];
        p.right = grid_.tau[i + 1];
        p.slope_left = slopes_[i];
        p.slope_right = slopes_[i + 1];
        p.coeffs[0] = grid_.values[i];
        p.coeffs[1] = slopes_[i];
        p.coeffs[2] = (3.0 * delta[i] - 2.0 * slopes_[i] - slopes_[i + 1]) / h[i];
        p.coeffs[3] = (slopes_[i] + slopes_[i + 1] - 2.0 * delta[i]) / (h[i] * h[i]);
    }
}

std::size_t CubicSpline::locate(double t) const {
    const auto it = std::upper_bound(grid_.tau.begin(), grid_.tau.end(), t);
    const auto k = static_cast<std::ptrdiff_t>(it - grid_.tau.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(pieces_.size()) - 1));
}

cplx CubicSpline::operator()(double t) const { return pieces_[locate(t)].value(t); }

cplx CubicSpline::derivative(double t) const { return pieces_[locate(t)].derivative(t); }

namespace {

void check_upsample(const ComplexSequence& sig, int factor, std::size_t min_len, const char* who) {
    if (factor < 1) throw std::invalid_argument(std::string(who) + ": V must be >= 1");
    if (sig.size() < min_len)
        throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(min_len) +
                                    " samples, got " + std::to_string(sig.size()));
}

// Evaluates `piece_value(k, u)` on the output grid: k is the piece index and
// u in sample units from knot k. The final V-1 points extend the last piece.
template <typename F>
ComplexSequence upsample_grid(const ComplexSequence& sig, int factor, F piece_value) {
    const std::size_t n = sig.size();
    const auto v = static_cast<std::size_t>(factor);
    std::vector<cplx> out(n * v);
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (j % v == 0 && j / v < n) {
            out[j] = sig[j / v];
            continue;
        }
        const std::size_t k = std::min(j / v, n - 2);
        const double u = static_cast<double>(j - k * v) / static_cast<double>(v);
        out[j] = piece_value(k, u);
    }
    return {std::move(out), target_rate(factor, sig.fs())};
}

}  // namespace

ComplexSequence lai_upsample(const ComplexSequence& sig, int factor) {
    check_upsample(sig, factor, 2, "lai_upsample");
    if (factor == 1) return sig;
    const auto z = sig.samples();
    return upsample_grid(sig, factor, [&](std::size_t k, double u) {
        return cplx(z[k].real() + u * (z[k + 1].real() - z[k].real()),
                    z[k].imag() + u * (z[k + 1].imag() - z[k].imag()));
    });
}

ComplexSequence csi_upsample(const ComplexSequence& sig, int factor) {
    check_upsample(sig, factor, 4, "csi_upsample");
    if (factor == 1) return sig;
    const CubicSpline spline(KnotGrid::uniform(sig.samples()));
    const auto pieces = spline.pieces();
    return upsample_grid(sig, factor, [&](std::size_t k, double u) {
        return pieces[k].value(pieces[k].left + u);
    });
}

}  // namespace seilab
