#pragma once

#include <array>
#include <span>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

/// F_H = V * F_L.
double target_rate(int factor, double f_low_hz);

/// Knot times (strictly increasing) with complex values.
struct KnotGrid {
    std::vector<double> tau;
    std::vector<cplx> values;

    /// Uniform knots 0, 1, ..., n-1 (sample units).
    static KnotGrid uniform(std::span<const cplx> values);
    void validate(std::size_t min_knots) const;
};

/// One cubic piece on [tau_i, tau_{i+1}] in Hermite form:
/// P(t) = c0 + c1 u + c2 u^2 + c3 u^3, u = t - tau_i, with c1 = s_i.
struct SplinePiece {
    double left = 0.0;
    double right = 0.0;
    std::array<cplx, 4> coeffs{};
    cplx slope_left{};
    cplx slope_right{};

    cplx value(double t) const;
    cplx derivative(double t) const;
};

/// Not-a-knot cubic spline through a KnotGrid (n >= 4). The knot slopes are
/// the solution of a tridiagonal system solved by forward elimination and
/// back substitution.
class CubicSpline {
public:
    explicit CubicSpline(KnotGrid grid);

    /// Evaluates the piece containing t; points outside [a, b] use the
    /// first or last piece.
    cplx operator()(double t) const;
    cplx derivative(double t) const;

    std::span<const SplinePiece> pieces() const { return pieces_; }
    std::span<const cplx> slopes() const { return slopes_; }

private:
    std::size_t locate(double t) const;

    KnotGrid grid_;
    std::vector<cplx> slopes_;
    std::vector<SplinePiece> pieces_;
};

/// Solves a tridiagonal system without pivoting. sub[0] and sup[n-1] are unused.
std::vector<cplx> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                    std::span<const double> sup, std::span<const cplx> rhs);

/// Piece-wise linear upsampling by V. Output has V * n samples: V(n-1)+1
/// interpolated points followed by V-1 points extrapolated from the last chord.
ComplexSequence lai_upsample(const ComplexSequence& sig, int factor);

/// Not-a-knot cubic-spline upsampling by V, same length convention as LAI.
ComplexSequence csi_upsample(const ComplexSequence& sig, int factor);

}  // namespace seilab
