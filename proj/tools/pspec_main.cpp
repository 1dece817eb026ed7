// pspec: command-line front end. Exit codes: 0 success, 2 usage error,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "pslab/config.hpp"
#include "pslab/io.hpp"
#include "pslab/pseudospectrum.hpp"
#include "pslab/quasimode.hpp"
#include "pslab/random_lab.hpp"
#include "pslab/symbol_calculus.hpp"

using namespace pslab;
using json = nlohmann::json;

namespace {

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_text(path, content);
    }
}

void emit_json(const RunConfig& c, json report) {
    report["provenance"] = {{"config", to_json(c)}, {"fingerprint", fingerprint(c)}};
    emit(c.out, report.dump(2) + "\n");
}

OperatorFamily family_for(const RunConfig& c) {
    const double energy = c.energy;
    if (c.model == "davies") return davies_family(energy);
    if (c.model == "ho") {
        return [energy](double h) { return selfadjoint_ho(h, hermite_dimension(h, energy)); };
    }
    if (c.model == "hager") {
        return [energy](double h) {
            return hager_model(h, 2 * Eigen::Index(std::ceil(energy / h)) + 1);
        };
    }
    throw UsageError("invalid value for 'model': no h-family for " + c.model);
}

std::string mask_csv(const ComplexGrid& g, const std::vector<std::vector<std::uint8_t>>& masks,
                     const std::string& header, const std::string& prov) {
    std::ostringstream out;
    std::istringstream lines(prov);
    for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
    out << "re,im," << header << "\n";
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            out << format_double(g.re_at(ix)) << "," << format_double(g.im_at(iy));
            for (const auto& m : masks) out << "," << int(m[g.index(ix, iy)]);
            out << "\n";
        }
    }
    return out.str();
}

Rect image_rect(const ComplexGrid& g) { return {g.re_min, g.re_max, g.im_min, g.im_max}; }

Rect disc_box(const SymbolModel& model, Complex z, double r) {
    return auto_phase_box(model, {z.real() - r, z.real() + r, z.imag() - r, z.imag() + r});
}

int run_symbol(const RunConfig& c) {
    const SymbolModel model = make_symbol(c.model);
    if (c.action == "sigma") {
        const auto mask = classical_spectrum_mask(model, c.grid, auto_phase_box(model, image_rect(c.grid)),
                                                  c.resolution, c.workers);
        emit(c.out, mask_csv(c.grid, {mask}, "in_sigma", provenance(c)));
    } else if (c.action == "lambda") {
        const auto m = lambda_pm_mask(model, c.grid, auto_phase_box(model, image_rect(c.grid)), c.resolution,
                                      c.workers);
        emit(c.out, mask_csv(c.grid, {m.plus, m.minus}, "lambda_plus,lambda_minus", provenance(c)));
    } else if (c.action == "order") {
        const auto pts = level_set(model, c.z, disc_box(model, c.z, 0.0), c.resolution);
        const auto k = order_at(model, c.z, pts, c.cap);
        json r;
        r["z"] = {c.z.real(), c.z.imag()};
        r["level_set_size"] = pts.size();
        if (k) {
            r["order"] = *k;
        } else {
            r["order"] = ">=" + std::to_string(c.cap);
        }
        json points = json::array();
        for (const auto& p : pts) {
            const auto b = bracket_report(model, p, c.cap);
            json e = {{"x", p.x}, {"xi", p.xi}, {"half_imag_bracket", b.half_imag_bracket}};
            if (b.order) e["order"] = *b.order;
            points.push_back(e);
        }
        r["points"] = points;
        emit_json(c, r);
    } else if (c.action == "volume") {
        const double r = std::sqrt(c.t);
        const double v = preimage_volume(model, ImageDisc{c.z, r}, disc_box(model, c.z, r));
        emit_json(c, {{"z", {c.z.real(), c.z.imag()}}, {"t", c.t}, {"volume", v}});
    } else if (c.action == "kappa") {
        const double k = kappa_fit(model, c.z, c.tlist);
        emit_json(c, {{"z", {c.z.real(), c.z.imag()}}, {"tlist", c.tlist}, {"kappa", k}});
    }
    return 0;
}

int run(const RunConfig& c) {
    if (c.command == "scan" || c.command == "contours") {
        SigmaMinField field;
        if (c.command == "contours" && !c.field.empty()) {
            field = parse_field_csv(read_text(c.field));
        } else {
            field = scan(make_operator(c.model, c.h, c.N), c.grid, c.workers);
        }
        if (field.missing > 0) std::cerr << "warning: " << field.missing << " grid points failed\n";
        if (c.command == "scan") {
            emit(c.out, field_csv(field, provenance(c)));
            return 0;
        }
        const ContourSet set = contours(field, c.levels);
        const std::string svg = contours_svg(set, field.grid, provenance(c));
        if (!c.svg.empty()) write_text(c.svg, svg);
        if (!c.out.empty() || c.svg.empty()) emit(c.out, svg);
        return 0;
    }
    if (c.command == "symbol") return run_symbol(c);
    if (c.command == "quasimode") {
        const auto report = residual_decay(family_for(c), c.z, c.hlist,
                                           c.sign == "plus" ? BeamSign::plus : BeamSign::minus, c.workers);
        emit_json(c, to_json(report));
        return 0;
    }
    if (c.command == "fit") {
        emit_json(c, to_json(boundary_exponent_fit(family_for(c), c.z, c.hlist, c.workers)));
        return 0;
    }
    if (c.command == "lab" && c.action == "weyl") {
        const DiscretizedOperator op = make_operator(c.model, c.h, c.N);
        PerturbationSpec spec;
        spec.kind = c.kind == "gaussian"    ? PerturbationKind::gaussian_matrix
                    : c.kind == "potential" ? PerturbationKind::random_potential
                                            : PerturbationKind::iid_matrix;
        spec.delta = c.delta ? *c.delta : default_delta(c.N);
        spec.n_modes = c.modes;
        spec.radius = c.radius;
        spec.force = c.force;
        spec.law = c.law == "pm1" ? IidLaw::pm1 : IidLaw::uniform_disc;
        const auto report = probabilistic_weyl_experiment(op, c.gamma, spec, c.draws, c.seed, c.workers);
        if (!c.eig_csv.empty()) write_text(c.eig_csv, eigenvalues_csv(report, provenance(c)));
        if (!c.svg.empty()) write_text(c.svg, weyl_svg(report, provenance(c)));
        emit_json(c, to_json(report));
        return 0;
    }
    if (c.command == "lab" && c.action == "ssv") {
        const ComplexMatrix x0 = c.model == "hager" ? hager_matrix(c.h, c.N) : make_operator(c.model, c.h, c.N).dense();
        const double delta = c.delta ? *c.delta : 1e-3;
        emit_json(c, to_json(ssv_tail_experiment(x0, delta, c.tgrid, c.draws, c.seed, c.workers)));
        return 0;
    }
    throw UsageError("unknown command");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const RunConfig config = parse_config(std::vector<std::string>(argv + 1, argv + argc));
        if (config.print_config) {
            std::cout << to_json(config).dump(2) << "\n";
            return 0;
        }
        return run(config);
    } catch (const HelpRequested& e) {
        std::cout << e.what();
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
