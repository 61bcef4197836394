#pragma once

#include <cstdint>
#include <vector>

#include "vortexlab/fields.hpp"

namespace vortexlab {

/// Jump threshold: an edge is a jump when the nearest integer of the nodal
/// lifting difference is nonzero, i.e. |d_phi| > 1/2.
inline constexpr double kJumpThreshold = 0.5;
/// An above-threshold edge is integer-flagged when the fractional residual
/// is at most this, or when it bounds a cell of nonzero plaquette winding.
inline constexpr double kIntegerResidual = 0.2;

/// One jump edge between grid-adjacent nodes. `horizontal` edges run from
/// node (i,j) to (i+1,j), vertical ones to (i,j+1); differences are taken in
/// the +x / +y direction. Integer-flagged edges carry the integer part of
/// the difference, fractional ones the raw difference.
struct JumpEdge {
    std::uint32_t i{0};
    std::uint32_t j{0};
    bool horizontal{true};
    bool integer_jump{false};
    double amplitude{0.0};

    bool operator==(const JumpEdge&) const = default;
};

/// S^1-valued field represented by a scalar lifting, nodal unit values
/// u = e^{2 pi i phi}, and the explicit jump-edge set. Immutable after
/// construction.
class S1GridField {
public:
    /// Threshold-based construction from a lifting (the spec operation).
    static S1GridField from_lifting(ScalarGridField lifting);

    /// Construction with a caller-supplied jump classification; edges not
    /// listed contribute their raw difference to the gradient. Used by the
    /// recovery builder and by tests that know the jump set analytically.
    static S1GridField with_explicit_jumps(ScalarGridField lifting,
                                           std::vector<JumpEdge> jumps);

    const Domain& domain() const { return lifting_.domain(); }
    const ScalarGridField& lifting() const { return lifting_; }
    const Vec2& unit(std::size_t i, std::size_t j) const {
        return unit_[domain().node_index(i, j)];
    }
    const std::vector<Vec2>& unit_values() const { return unit_; }
    const std::vector<JumpEdge>& jump_edges() const { return jumps_; }

    /// Corrected lifting difference along the edge (gradient contribution):
    /// raw difference off jumps, fractional residual on integer jumps, zero
    /// on fractional jumps.
    double hedge_diff(std::size_t i, std::size_t j) const { return hdiff_[j * nxe() + i]; }
    double vedge_diff(std::size_t i, std::size_t j) const { return vdiff_[j * (nxe() + 1) + i]; }

    /// Plaquette winding of the cell (XY-model vortex detector); exact integer.
    int cell_winding(std::size_t i, std::size_t j) const;

    /// Lifting value at cell center consistent with the corrected edge
    /// differences around node (i,j).
    double cell_mean_lifting(std::size_t i, std::size_t j) const;

    /// H^1 surrogate lengths: (number of edges) * h.
    double fractional_jump_length() const;
    double total_jump_length() const;

    /// True when every fractional jump edge midpoint lies in the closed
    /// inner subdomain.
    bool jumps_admissible() const;

private:
    explicit S1GridField(ScalarGridField lifting);
    std::size_t nxe() const { return domain().nx(); }

    ScalarGridField lifting_;
    std::vector<Vec2> unit_;
    std::vector<double> hdiff_;  // (nx) x (ny+1)
    std::vector<double> vdiff_;  // (nx+1) x (ny)
    std::vector<JumpEdge> jumps_;
};

/// Lifting value of a degree-z vortex at an arbitrary point: (z/2pi) times
/// the branch angle of (p - center).
double canonical_vortex_phase(const Vec2& center, int z, const Vec2& p);

/// Center snapped to the nearest cell center of the domain.
Vec2 snap_to_cell_center(const Domain& domain, const Vec2& p);

/// Nodal lifting of a degree-z vortex at `center` (snapped to a cell
/// center). The induced jump edges lie on the downward ray from the center.
ScalarGridField canonical_vortex_lifting(const Domain& domain, const Vec2& center, int z);

/// Threshold construction of the unit field from a lifting.
inline S1GridField build_s1_field(ScalarGridField lifting) {
    return S1GridField::from_lifting(std::move(lifting));
}

/// Cell-centered approximate gradient of the lifting, jump-corrected.
VectorGridField approximate_gradient(const S1GridField& field);

}  // namespace vortexlab
