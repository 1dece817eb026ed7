#include <algorithm>
#include <array>
#include <unordered_map>

#include "pslab/pseudospectrum.hpp"

namespace pslab {
namespace {

// Grid edges get a unique key: 2·(node index) for the edge going right from
// the node, 2·(node index) + 1 for the edge going up.
using EdgeKey = std::size_t;

struct Segment {
    EdgeKey a, b;
    Complex pa, pb;
};

struct CellEdges {
    std::array<EdgeKey, 4> key;  // bottom, right, top, left
    std::array<Complex, 4> point;
};

Complex interpolate(Complex p0, Complex p1, double f0, double f1, double level) {
    const double denom = f1 - f0;
    const double t = denom == 0.0 ? 0.5 : std::clamp((level - f0) / denom, 0.0, 1.0);
    return p0 + t * (p1 - p0);
}

std::vector<Segment> cell_segments(const SigmaMinField& field, double level) {
    const ComplexGrid& g = field.grid;
    std::vector<Segment> segs;
    for (int iy = 0; iy + 1 < g.ny; ++iy) {
        for (int ix = 0; ix + 1 < g.nx; ++ix) {
            // Corners counter-clockwise from bottom-left.
            const std::array<double, 4> f = {field.at(ix, iy), field.at(ix + 1, iy),
                                             field.at(ix + 1, iy + 1), field.at(ix, iy + 1)};
            int code = 0;
            for (int k = 0; k < 4; ++k) code |= (f[k] >= level ? 1 : 0) << k;
            if (code == 0 || code == 15) continue;

            const std::array<Complex, 4> p = {g.node(ix, iy), g.node(ix + 1, iy),
                                              g.node(ix + 1, iy + 1), g.node(ix, iy + 1)};
            CellEdges e;
            e.key = {2 * g.index(ix, iy), 2 * g.index(ix + 1, iy) + 1, 2 * g.index(ix, iy + 1),
                     2 * g.index(ix, iy) + 1};
            for (int k = 0; k < 4; ++k) {
                const int c0 = k;
                const int c1 = (k + 1) % 4;
                e.point[k] = interpolate(p[c0], p[c1], f[c0], f[c1], level);
            }
            auto emit = [&](int ea, int eb) {
                segs.push_back({e.key[ea], e.key[eb], e.point[ea], e.point[eb]});
            };
            // Edge k joins corner k to corner k+1 and is crossed iff the two
            // corners differ in classification.
            switch (code) {
                case 1: case 14: emit(3, 0); break;
                case 2: case 13: emit(0, 1); break;
                case 3: case 12: emit(3, 1); break;
                case 4: case 11: emit(1, 2); break;
                case 6: case 9: emit(0, 2); break;
                case 7: case 8: emit(3, 2); break;
                case 5: case 10: {
                    const double centre = 0.25 * (f[0] + f[1] + f[2] + f[3]);
                    // Corners 0 and 2 agree; the centre decides whether they
                    // are joined through the middle of the cell.
                    const bool centre_like_02 = (centre >= level) == (f[0] >= level);
                    if (centre_like_02) {
                        emit(0, 1);
                        emit(2, 3);
                    } else {
                        emit(3, 0);
                        emit(1, 2);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segs;
}

std::vector<Polyline> join(const std::vector<Segment>& segs) {
    std::unordered_map<EdgeKey, std::vector<std::size_t>> at_edge;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        at_edge[segs[i].a].push_back(i);
        at_edge[segs[i].b].push_back(i);
    }
    std::vector<std::uint8_t> used(segs.size(), 0);
    std::vector<Polyline> lines;

    auto walk = [&](std::size_t start, EdgeKey from) {
        Polyline line;
        std::size_t cur = start;
        EdgeKey entry = from;
        line.points.push_back(segs[cur].a == entry ? segs[cur].pa : segs[cur].pb);
        while (true) {
            used[cur] = 1;
            const bool forward = segs[cur].a == entry;
            const EdgeKey exit = forward ? segs[cur].b : segs[cur].a;
            line.points.push_back(forward ? segs[cur].pb : segs[cur].pa);
            std::size_t next = segs.size();
            for (std::size_t cand : at_edge[exit]) {
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next == segs.size()) {
                line.closed = exit == from && line.points.size() > 2;
                break;
            }
            cur = next;
            entry = exit;
        }
        if (line.closed) line.points.pop_back();
        return line;
    };

    // Open chains start at edges touched by a single segment (grid boundary).
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        if (at_edge[segs[i].a].size() == 1) {
            lines.push_back(walk(i, segs[i].a));
        } else if (at_edge[segs[i].b].size() == 1) {
            lines.push_back(walk(i, segs[i].b));
        }
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!used[i]) lines.push_back(walk(i, segs[i].a));
    }
    return lines;
}

}  // namespace

bool ContourSet::empty() const {
    return std::all_of(levels.begin(), levels.end(),
                       [](const ContourLevel& l) { return l.lines.empty(); });
}

ContourSet contours(const SigmaMinField& field, std::span<const double> levels) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0)) throw InvalidArgument("contours: levels must be positive");
        if (i > 0 && !(levels[i] > levels[i - 1])) {
            throw InvalidArgument("contours: levels must be strictly ascending");
        }
    }
    ContourSet out;
    for (double level : levels) out.levels.push_back({level, join(cell_segments(field, level))});
    return out;
}

}  // namespace pslab
