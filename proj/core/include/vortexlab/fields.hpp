#pragma once

#include <string>
#include <vector>

#include "vortexlab/domain.hpp"

namespace vortexlab {

/// Real scalar samples on the grid nodes (liftings, test functions, ...).
class ScalarGridField {
public:
    explicit ScalarGridField(Domain domain, double fill = 0.0)
        : domain_(std::move(domain)), values_(domain_.node_count(), fill) {}
    ScalarGridField(Domain domain, std::vector<double> values)
        : domain_(std::move(domain)), values_(std::move(values)) {
        if (values_.size() != domain_.node_count()) {
            throw std::invalid_argument("ScalarGridField: value count does not match node count");
        }
    }

    const Domain& domain() const { return domain_; }
    double operator()(std::size_t i, std::size_t j) const {
        return values_[domain_.node_index(i, j)];
    }
    double& at(std::size_t i, std::size_t j) { return values_[domain_.node_index(i, j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    Domain domain_;
    std::vector<double> values_;
};

/// Planar vectors sampled at cell centers (gradients, currents, kernels).
class VectorGridField {
public:
    explicit VectorGridField(Domain domain)
        : domain_(std::move(domain)), values_(domain_.cell_count()) {}

    const Domain& domain() const { return domain_; }
    const Vec2& operator()(std::size_t i, std::size_t j) const {
        return values_[domain_.cell_index(i, j)];
    }
    Vec2& at(std::size_t i, std::size_t j) { return values_[domain_.cell_index(i, j)]; }
    const std::vector<Vec2>& values() const { return values_; }
    std::vector<Vec2>& values() { return values_; }

    /// Sum of |v|^2 h^2 over all cells.
    double l2_norm_sq() const {
        double s = 0.0;
        for (const Vec2& v : values_) s += v.norm2();
        return s * domain_.h() * domain_.h();
    }

private:
    Domain domain_;
    std::vector<Vec2> values_;
};

/// R^2-valued samples on grid nodes; the raw (not S^1-constrained) order
/// parameter of the Ginzburg-Landau functional.
class RawVectorField {
public:
    explicit RawVectorField(Domain domain, Vec2 fill = {0.0, 0.0})
        : domain_(std::move(domain)), values_(domain_.node_count(), fill) {}

    const Domain& domain() const { return domain_; }
    const Vec2& operator()(std::size_t i, std::size_t j) const {
        return values_[domain_.node_index(i, j)];
    }
    Vec2& at(std::size_t i, std::size_t j) { return values_[domain_.node_index(i, j)]; }
    const std::vector<Vec2>& values() const { return values_; }

private:
    Domain domain_;
    std::vector<Vec2> values_;
};

/// Text dump, header `vortexlab-field v1 nx ny h x0 y0` followed by
/// row-major nodal values (y-outer, x-inner), 17 significant digits.
void write_field(const ScalarGridField& field, const std::string& path);
ScalarGridField read_field(const std::string& path);

}  // namespace vortexlab
