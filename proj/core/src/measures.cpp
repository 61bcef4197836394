#include "vortexlab/measures.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vortexlab {

PiecewiseDensity::PiecewiseDensity(std::vector<DensityPiece> pieces)
    : pieces_(std::move(pieces)) {
    for (std::size_t a = 0; a < pieces_.size(); ++a) {
        if (!(pieces_[a].region.area() > 0.0)) {
            throw std::invalid_argument("PiecewiseDensity: piece with nonpositive area");
        }
        for (std::size_t b = a + 1; b < pieces_.size(); ++b) {
            if (pieces_[a].region.overlap_area(pieces_[b].region) > 1e-12) {
                throw std::invalid_argument("PiecewiseDensity: overlapping pieces");
            }
        }
    }
}

double PiecewiseDensity::value_at(const Vec2& p) const {
    for (const DensityPiece& piece : pieces_) {
        if (piece.region.contains(p)) return piece.level;
    }
    return 0.0;
}

double PiecewiseDensity::integral(const Rect& r) const {
    double acc = 0.0;
    for (const DensityPiece& piece : pieces_) {
        acc += piece.level * piece.region.overlap_area(r);
    }
    return acc;
}

double PiecewiseDensity::total_variation() const {
    double acc = 0.0;
    for (const DensityPiece& piece : pieces_) {
        acc += std::abs(piece.level) * piece.region.area();
    }
    return acc;
}

double total_variation(const AtomicMeasure& mu) {
    double acc = 0.0;
    for (const Atom& a : mu.atoms()) acc += std::abs(a.weight);
    return acc;
}

FlatDistanceResult flat_distance_to_density(const AtomicMeasure& nu, const PiecewiseDensity& mu,
                                            const Domain& omega, double hq) {
    if (!(hq > 0.0)) throw std::invalid_argument("flat_distance_to_density: hq must be > 0");
    // Midpoint atomization of the density on an hq lattice over Omega.
    AtomicMeasure diff = nu;
    const Rect b = omega.bounds();
    const auto nx = static_cast<std::size_t>(std::ceil(b.width() / hq - 1e-12));
    const auto ny = static_cast<std::size_t>(std::ceil(b.height() / hq - 1e-12));
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const Rect cell{{b.lo.x + hq * static_cast<double>(i), b.lo.y + hq * static_cast<double>(j)},
                            {std::min(b.lo.x + hq * static_cast<double>(i + 1), b.hi.x),
                             std::min(b.lo.y + hq * static_cast<double>(j + 1), b.hi.y)}};
            const double mass = mu.integral(cell);
            if (mass != 0.0) {
                diff.add({0.5 * (cell.lo.x + cell.hi.x), 0.5 * (cell.lo.y + cell.hi.y)}, -mass);
            }
        }
    }
    FlatDistanceResult out;
    out.value = flat_norm_atomic(diff, omega);
    out.atomization_bound = hq * mu.total_variation();
    return out;
}

void write_measure_csv(const AtomicMeasure& mu, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_measure_csv: cannot open " + path);
    std::fprintf(f, "x,y,weight\n");
    for (const Atom& a : mu.atoms()) {
        std::fprintf(f, "%.17g,%.17g,%.17g\n", a.position.x, a.position.y, a.weight);
    }
    std::fclose(f);
}

AtomicMeasure read_measure_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("read_measure_csv: cannot open " + path);
    char header[64];
    if (!std::fgets(header, sizeof header, f)) {
        std::fclose(f);
        throw std::runtime_error("read_measure_csv: empty file " + path);
    }
    AtomicMeasure m;
    double x, y, w;
    while (std::fscanf(f, "%lg,%lg,%lg", &x, &y, &w) == 3) m.add({x, y}, w);
    std::fclose(f);
    return m;
}

void write_density_csv(const PiecewiseDensity& mu, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_density_csv: cannot open " + path);
    std::fprintf(f, "x0,y0,x1,y1,level\n");
    for (const DensityPiece& p : mu.pieces()) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.region.lo.x, p.region.lo.y,
                     p.region.hi.x, p.region.hi.y, p.level);
    }
    std::fclose(f);
}

PiecewiseDensity read_density_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("read_density_csv: cannot open " + path);
    char header[64];
    if (!std::fgets(header, sizeof header, f)) {
        std::fclose(f);
        throw std::runtime_error("read_density_csv: empty file " + path);
    }
    std::vector<DensityPiece> pieces;
    double x0, y0, x1, y1, level;
    while (std::fscanf(f, "%lg,%lg,%lg,%lg,%lg", &x0, &y0, &x1, &y1, &level) == 5) {
        pieces.push_back({{{x0, y0}, {x1, y1}}, level});
    }
    std::fclose(f);
    return PiecewiseDensity(std::move(pieces));
}

}  // namespace vortexlab
