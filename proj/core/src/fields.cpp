#include "vortexlab/fields.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>

namespace vortexlab {

void write_field(const ScalarGridField& field, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_field: cannot open " + path);
    const Domain& d = field.domain();
    std::fprintf(f, "vortexlab-field v1 %zu %zu %.17g %.17g %.17g\n", d.nx() + 1, d.ny() + 1,
                 d.h(), d.lower().x, d.lower().y);
    for (std::size_t j = 0; j <= d.ny(); ++j) {
        for (std::size_t i = 0; i <= d.nx(); ++i) {
            std::fprintf(f, "%.17g\n", field(i, j));
        }
    }
    std::fclose(f);
}

ScalarGridField read_field(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("read_field: cannot open " + path);
    char magic[32] = {0};
    char version[8] = {0};
    std::size_t nodes_x = 0, nodes_y = 0;
    double h = 0.0, x0 = 0.0, y0 = 0.0;
    if (std::fscanf(f, "%31s %7s %zu %zu %lg %lg %lg", magic, version, &nodes_x, &nodes_y, &h,
                    &x0, &y0) != 7 ||
        std::string(magic) != "vortexlab-field" || std::string(version) != "v1") {
        std::fclose(f);
        throw std::runtime_error("read_field: bad header in " + path);
    }
    if (nodes_x < 2 || nodes_y < 2) {
        std::fclose(f);
        throw std::runtime_error("read_field: degenerate grid in " + path);
    }
    const double wx = h * static_cast<double>(nodes_x - 1);
    const double wy = h * static_cast<double>(nodes_y - 1);
    Domain domain({x0, y0}, {x0 + wx, y0 + wy}, h);
    std::vector<double> values(nodes_x * nodes_y);
    for (double& v : values) {
        if (std::fscanf(f, "%lg", &v) != 1) {
            std::fclose(f);
            throw std::runtime_error("read_field: truncated data in " + path);
        }
    }
    std::fclose(f);
    return {std::move(domain), std::move(values)};
}

}  // namespace vortexlab
