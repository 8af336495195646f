#include "urnsim/landscape.hpp"

#include <ostream>
#include <stdexcept>

#include "urnsim/equilibria.hpp"
#include "urnsim/io.hpp"

namespace urnsim {

double potential(const ModelParams& p, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != p.n_agents)
        throw std::invalid_argument("potential: z length must equal N");
    double sum = 0.0, sumsq = 0.0, sumphi = 0.0;
    for (double v : z) {
        sum += v;
        sumsq += v * v;
        sumphi += p.f.primitive(v);
    }
    return -p.alpha / (2.0 * p.n_agents) * sum * sum - p.beta * p.q * sum -
           p.weight() * sumphi + 0.5 * sumsq;
}

std::vector<FieldRow> field_grid(const ModelParams& p, const GridSpec& grid) {
    if (p.n_agents != 2)
        throw std::invalid_argument("field_grid: only defined for N = 2");
    if (grid.resolution < 2 || grid.resolution > 4096)
        throw std::invalid_argument("field_grid: resolution must lie in [2, 4096]");

    const int res = grid.resolution;
    std::vector<FieldRow> rows;
    rows.reserve(static_cast<std::size_t>(res) * res);
    for (int i = 0; i < res; ++i) {
        const double z1 = static_cast<double>(i) / (res - 1);
        for (int j = 0; j < res; ++j) {
            const double z2 = static_cast<double>(j) / (res - 1);
            const std::vector<double> z{z1, z2};
            const std::vector<double> f = drift(p, z);
            rows.push_back({z1, z2, f[0], f[1], potential(p, z)});
        }
    }
    return rows;
}

void write_field_csv(std::ostream& os, const std::vector<FieldRow>& rows) {
    os << "z1,z2,F1,F2,V\n";
    for (const auto& r : rows)
        os << format_double(r.z1) << ',' << format_double(r.z2) << ','
           << format_double(r.f1) << ',' << format_double(r.f2) << ','
           << format_double(r.v) << '\n';
}

} // namespace urnsim
