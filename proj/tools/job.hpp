#pragma once

// Job document handling for the isospec command line tool.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include <isospec/isospec.hpp>

namespace isospec::cli {

using json = nlohmann::json;

inline constexpr const char* tool_version = "0.1.0";

// Malformed job document or flag value (exit status 2).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct options {
    double tol = 1e-12; // root bracket tolerance
    double newton_tol = 1e-12;
    int max_iter = 100;
    double verify_tol = 1e-8;
    std::vector<double> t_grid = default_t_grid();
    std::string format = "json";
};

// Values given on the command line; they win over the job document.
struct overrides {
    std::optional<double> tol;
    std::optional<double> newton_tol;
    std::optional<int> max_iter;
    std::optional<std::string> t_grid;
    std::optional<std::string> format;
};

struct outcome {
    int exit_code = 0;
    std::string output;     // payload for stdout
    std::string diagnostic; // message for stderr
};

// "a:b:n" -> geometric grid from a to b with n points.
inline std::vector<double> parse_t_grid(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw input_error("t grid must look like a:b:n, got '" + s + "'");
    try {
        std::size_t used = 0;
        const std::string sa = s.substr(0, c1), sb = s.substr(c1 + 1, c2 - c1 - 1), sn = s.substr(c2 + 1);
        const double a = std::stod(sa, &used);
        if (used != sa.size()) throw std::invalid_argument(sa);
        const double b = std::stod(sb, &used);
        if (used != sb.size()) throw std::invalid_argument(sb);
        const int n = std::stoi(sn, &used);
        if (used != sn.size()) throw std::invalid_argument(sn);
        if (!(a > 0 && b > 0 && n >= 1)) throw input_error("t grid needs a, b > 0 and n >= 1");
        return geometric_grid(a, b, n);
    } catch (const std::logic_error&) {
        throw input_error("t grid must look like a:b:n, got '" + s + "'");
    }
}

namespace detail {

inline void write_number(std::ostringstream& os, double v) {
    if (!std::isfinite(v)) {
        os << "null";
        return;
    }
    if (v == 0) v = 0; // no negative zero in the output
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

inline void write_json(std::ostringstream& os, const json& j, int indent) {
    const std::string pad(indent + 2, ' '), end_pad(indent, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            break;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            write_json(os, it.value(), indent + 2);
        }
        os << "\n" << end_pad << "}";
        break;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            break;
        }
        // flat numeric arrays stay on one line
        const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        os << (flat ? "[" : "[\n");
        bool first = true;
        for (const auto& e : j) {
            if (!first) os << (flat ? ", " : ",\n");
            first = false;
            if (!flat) os << pad;
            write_json(os, e, indent + 2);
        }
        if (!flat) os << "\n" << end_pad;
        os << "]";
        break;
    }
    case json::value_t::number_float:
        write_number(os, j.get<double>());
        break;
    default:
        os << j.dump();
    }
}

inline json to_json(const vector& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline json to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline json to_json(const matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(vector(m.row(i).transpose())));
    return a;
}

inline json to_json(const std::vector<interval>& v) {
    json a = json::array();
    for (const auto& i : v) a.push_back(json::array({i.lo, i.hi}));
    return a;
}

inline vector number_array(const json& j, const char* name) {
    if (!j.is_array()) throw input_error(std::string("'") + name + "' must be an array of numbers");
    vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw input_error(std::string("'") + name + "' must contain only numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

template <typename T>
T get_number(const json& j, const char* name) {
    if (!j.is_number()) throw input_error(std::string("'") + name + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!j.is_number_integer()) throw input_error(std::string("'") + name + "' must be an integer");
    }
    return j.get<T>();
}

// The potential section of a job: values, k + qhat, or k + free.
struct potential_spec {
    enum class form { none, values, qhat, free } kind = form::none;
    vector data;
    std::optional<int> k;

    bool present() const { return kind != form::none; }

    potential general() const {
        if (kind == form::values) return potential(data);
        return odd().base();
    }

    odd_potential odd() const {
        switch (kind) {
        case form::values: return odd_from_values(data);
        case form::qhat: return odd_from_coords(static_cast<int>(data.size()), data);
        case form::free: return odd_from_free(data);
        default: throw input_error("job has no potential");
        }
    }
};

inline potential_spec parse_potential(const json& job) {
    potential_spec p;
    int forms = 0;
    for (const char* key : {"values", "qhat", "free"}) {
        if (!job.contains(key)) continue;
        ++forms;
        p.data = number_array(job[key], key);
        p.kind = key[0] == 'v' ? potential_spec::form::values
                 : key[0] == 'q' ? potential_spec::form::qhat
                                 : potential_spec::form::free;
    }
    if (forms > 1) throw input_error("give exactly one of 'values', 'qhat', 'free'");
    if (job.contains("k")) {
        const int k = get_number<int>(job["k"], "k");
        if (k < 1) throw input_error("'k' must be positive");
        p.k = k;
    }
    if (!p.present()) return p;
    if (p.kind == potential_spec::form::values) {
        if (p.data.size() < 2) throw input_error("'values' needs at least 2 entries");
        if (p.k && p.data.size() != 2 * *p.k) throw input_error("'values' must have 2k entries");
    } else {
        if (p.data.size() < 1) throw input_error("coordinate list is empty");
        if (p.k && p.data.size() != *p.k) throw input_error("coordinate list must have k entries");
    }
    return p;
}

inline options resolve_options(const json& job, const overrides& flags) {
    options o;
    if (job.contains("options")) {
        const json& j = job["options"];
        if (!j.is_object()) throw input_error("'options' must be an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& key = it.key();
            if (key == "tol") o.tol = get_number<double>(*it, "tol");
            else if (key == "newton_tol") o.newton_tol = get_number<double>(*it, "newton_tol");
            else if (key == "max_iter") o.max_iter = get_number<int>(*it, "max_iter");
            else if (key == "verify_tol") o.verify_tol = get_number<double>(*it, "verify_tol");
            else if (key == "format") {
                if (!it->is_string()) throw input_error("'format' must be a string");
                o.format = it->get<std::string>();
            } else if (key == "t_grid") {
                if (it->is_string()) o.t_grid = parse_t_grid(it->get<std::string>());
                else {
                    const vector g = number_array(*it, "t_grid");
                    o.t_grid.assign(g.begin(), g.end());
                }
            } else {
                throw input_error("unknown option '" + key + "'");
            }
        }
    }
    if (flags.tol) o.tol = *flags.tol;
    if (flags.newton_tol) o.newton_tol = *flags.newton_tol;
    if (flags.max_iter) o.max_iter = *flags.max_iter;
    if (flags.t_grid) o.t_grid = parse_t_grid(*flags.t_grid);
    if (flags.format) o.format = *flags.format;

    if (o.format != "json" && o.format != "csv") throw input_error("format must be json or csv");
    if (!(o.tol > 0) || !(o.newton_tol > 0) || !(o.verify_tol > 0)) throw input_error("tolerances must be positive");
    if (o.max_iter < 1) throw input_error("max_iter must be positive");
    return o;
}

inline json potential_json(const odd_potential& q) {
    return {{"k", q.k()}, {"qhat", to_json(q.qhat())}, {"values", to_json(q.values())}};
}

inline json bands_result(const potential& q, const options& o) {
    const auto p = delta_poly(q);
    const auto b = compute_band_structure(p, {o.tol, 200});
    std::vector<double> edges{b.outer_left, b.outer_right};
    edges.insert(edges.end(), b.edges_minus.begin(), b.edges_minus.end());
    edges.insert(edges.end(), b.edges_plus.begin(), b.edges_plus.end());
    std::sort(edges.begin(), edges.end());
    return {{"period", q.period()},
            {"delta_coeffs", to_json(p.coeffs())},
            {"critical", to_json(b.critical)},
            {"edges", to_json(edges)},
            {"edges_minus", to_json(b.edges_minus)},
            {"edges_plus", to_json(b.edges_plus)},
            {"outer_edges", json::array({b.outer_left, b.outer_right})},
            {"H", to_json(b.H)},
            {"heights", to_json(b.heights)},
            {"bands", to_json(b.bands)},
            {"gaps", to_json(b.gaps)}};
}

inline json heights_result_json(const potential_spec& ps, const options& o) {
    const auto q = ps.general();
    const auto b = compute_band_structure(q, {o.tol, 200});
    json r = {{"period", q.period()}, {"critical", to_json(b.critical)}, {"H", to_json(b.H)},
              {"heights", to_json(b.heights)}};
    const bool odd = q.period() % 2 == 0 && odd_residual(q.values()) <= 1e-12 * std::max(1.0, q.norm());
    if (odd) {
        const auto oq = ps.odd();
        const auto hm = height_map(oq, {o.tol, 200});
        const auto s = singularity(oq);
        r["height_jacobian"] = hm.jacobian ? to_json(*hm.jacobian) : json(nullptr);
        r["singularity"] = {{"det", s.det_value}, {"is_singular", s.is_singular}};
    }
    return r;
}

inline json phi_result(const odd_potential& q) {
    const auto s = singularity(q);
    json r = potential_json(q);
    r["delta_coeffs"] = to_json(delta_poly(q).coeffs());
    r["phi"] = to_json(phi_map(q));
    r["jacobian"] = to_json(jacobian_phi(q));
    r["det"] = s.det_value;
    r["is_singular"] = s.is_singular;
    return r;
}

inline json iso_result(const json& job, const potential_spec& ps, const options& o) {
    newton_options no;
    no.tol_residual = o.newton_tol;
    no.max_iter = o.max_iter;

    iso_set set = [&] {
        if (job.contains("target")) {
            const vector target = number_array(job["target"], "target");
            if (target.size() < 1) throw input_error("'target' is empty");
            if (!ps.present()) return isospectral_set_from_target(target, no);
            const auto seed = ps.odd();
            if (seed.k() != target.size()) throw input_error("'target' must have k entries");
            auto s = solve_from_seeds(target, sign_flip_seeds(seed), dedup_tolerance(seed.norm()), no);
            return s;
        }
        if (!ps.present()) throw input_error("iso needs a potential or a 'target'");
        return isospectral_set(ps.odd(), no);
    }();

    json r;
    r["k"] = static_cast<int>(set.target.size());
    r["target"] = to_json(set.target);
    r["count"] = set.count();
    json members = json::array();
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        json m = potential_json(set.members[i]);
        m["residual"] = set.residuals[i];
        if (set.source) {
            const auto v = verify_isospectral(set.members[i], *set.source, o.verify_tol, {o.tol, 200});
            m["verification"] = {{"coefficient_residual", v.coefficient_residual},
                                 {"edge_residual", v.edge_residual},
                                 {"height_residual", v.height_residual},
                                 {"pass", v.all()}};
        }
        members.push_back(std::move(m));
    }
    r["members"] = std::move(members);
    json seeds = json::array();
    for (const auto& s : set.seeds)
        seeds.push_back({{"seed_qhat", to_json(s.seed_qhat)},
                         {"status", to_string(s.status)},
                         {"iterations", s.iterations},
                         {"residual", s.residual},
                         {"message", s.message}});
    r["seeds"] = std::move(seeds);
    if (set.source) {
        const double tol = dedup_tolerance(set.source->norm());
        r["source_found"] = std::any_of(set.members.begin(), set.members.end(), [&](const odd_potential& m) {
            return (m.values() - set.source->values()).cwiseAbs().maxCoeff() <= tol;
        });
    }
    return r;
}

inline json asymptotics_result(const convergence_report& rep) {
    json qs = json::array();
    for (std::size_t c = 0; c < rep.quantities.size(); ++c) {
        json errs = json::array();
        for (Eigen::Index i = 0; i < rep.errors.rows(); ++i) errs.push_back(rep.errors(i, c));
        qs.push_back({{"name", rep.quantities[c]},
                      {"relative", bool(rep.relative[c])},
                      {"errors", errs},
                      {"fitted_order", rep.fitted_order[c]}});
    }
    json samples = json::array();
    for (const auto& s : rep.samples)
        samples.push_back(
            {{"t", s.t}, {"quantity", s.quantity}, {"exact", s.exact}, {"predicted", s.predicted}, {"rel_error", s.error}});
    return {{"t_grid", to_json(rep.t_grid)}, {"quantities", qs}, {"samples", samples}};
}

inline std::string asymptotics_csv(const convergence_report& rep) {
    std::ostringstream os;
    os << "t,quantity,exact,predicted,rel_error\n";
    for (const auto& s : rep.samples) {
        write_number(os, s.t);
        os << ',' << s.quantity << ',';
        write_number(os, s.exact);
        os << ',';
        write_number(os, s.predicted);
        os << ',';
        write_number(os, s.error);
        os << '\n';
    }
    return os.str();
}

// Built-in identity checks with fixed random seeds.
inline json identity_suite() {
    json checks = json::array();
    bool all = true;
    auto add = [&](const char* name, double residual, double tol) {
        const bool pass = residual <= tol;
        all = all && pass;
        checks.push_back({{"name", name}, {"max_residual", residual}, {"tolerance", tol}, {"pass", pass}});
    };

    double det_res = 0;
    for (int k = 1; k <= 10; ++k) det_res = std::max(det_res, std::abs(make_expansion_matrices(k).A.determinant() - 1));
    add("det_A", det_res, 1e-9);

    double cheb = 0;
    for (int k = 1; k <= 10; ++k) {
        const auto e = make_expansion_matrices(k);
        const std::vector<long long> zero(2 * k, 0);
        const auto p = delta_poly_of<long long>(std::span<const long long>(zero));
        for (int m = 0; m <= k; ++m) {
            const long long want = ((m + k) % 2 == 0 ? 1 : -1) * e.R[m];
            cheb = std::max(cheb, double(std::llabs(p[2 * m] - want)));
            if (m < k) cheb = std::max(cheb, double(std::llabs(p[2 * m + 1])));
        }
    }
    add("chebyshev_baseline", cheb, 0);

    double row_res = 0, d2_res = 0;
    for (int k = 1; k <= 8; ++k) {
        const auto e = make_expansion_matrices(k);
        const auto p = delta_poly(potential::zero(2 * k)).poly().derivative().derivative();
        for (int n = 1; n <= k; ++n) {
            vector want = vector::Zero(k);
            want[n - 1] = (n == k ? 2.0 : 1.0) / (4.0 * k);
            row_res = std::max(row_res, (edge_shift_row(k, n, e) - want).cwiseAbs().maxCoeff());
            const double closed = rest_second_derivative(k, n);
            d2_res = std::max(d2_res, std::abs(p(rest_critical(k, n)) - closed) / std::max(1.0, std::abs(closed)));
        }
    }
    add("edge_shift_rows", row_res, 1e-9);
    add("second_derivative", d2_res, 1e-9);

    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> g;
    double fw = 0, sym = 0;
    for (int k = 1; k <= 8; ++k) {
        const matrix w = w_matrix(k);
        for (int c = 0; c < 50; ++c) {
            vector qh(k);
            for (auto& x : qh) x = g(rng);
            const auto q = odd_from_coords(k, qh);
            fw = std::max(fw, (quad_forms(q) - w * qh.cwiseAbs2()).cwiseAbs().maxCoeff());
            const potential neg(-q.values());
            for (double x : {-1.7, -0.3, 0.9, 2.2}) {
                const double d = eval_delta(x, q);
                const double scale = std::max(1.0, std::abs(d));
                sym = std::max({sym, std::abs(eval_delta(x, shift(q)) - d) / scale,
                                std::abs(eval_delta(x, reflect(q)) - d) / scale,
                                std::abs(eval_delta(-x, q) - d) / scale, std::abs(eval_delta(x, neg) - d) / scale});
            }
        }
    }
    add("fourier_forms", fw, 1e-10);
    add("symmetries", sym, 1e-12);
    return {{"checks", checks}, {"all_pass", all}};
}

inline json verify_result(const json& job, const potential_spec& ps, const options& o) {
    if (!ps.present()) {
        if (job.contains("other")) throw input_error("'other' needs a potential to compare with");
        return identity_suite();
    }
    if (!job.contains("other")) throw input_error("verify with a potential needs an 'other' potential");
    const json& other = job["other"];
    if (!other.is_object()) throw input_error("'other' must be an object holding a potential");
    const auto ops = parse_potential(other);
    if (!ops.present()) throw input_error("'other' holds no potential");
    const auto v = verify_isospectral(ps.odd(), ops.odd(), o.verify_tol, {o.tol, 200});
    return {{"coefficient_residual", v.coefficient_residual},
            {"edge_residual", v.edge_residual},
            {"height_residual", v.height_residual},
            {"coefficients_match", v.coefficients_match()},
            {"edges_match", v.edges_match()},
            {"heights_match", v.heights_match()},
            {"isospectral", v.all()},
            {"tolerance", v.tol}};
}

inline json oracle_result(const potential& q) {
    const auto a = delta_poly(q), b = delta_combinatorial(q);
    return {{"period", q.period()},
            {"recurrence", to_json(a.coeffs())},
            {"combinatorial", to_json(b.coeffs())},
            {"max_abs_diff", max_coeff_diff(a.poly(), b.poly())},
            {"max_rel_diff", max_coeff_diff(a.poly(), b.poly(), true)}};
}

} // namespace detail

inline std::string dump(const json& j) {
    std::ostringstream os;
    detail::write_json(os, j, 0);
    os << '\n';
    return os.str();
}

inline outcome run(const json& job, const overrides& flags = {}) {
    outcome out;
    try {
        if (!job.is_object()) throw input_error("job must be a JSON object");
        if (!job.contains("command") || !job["command"].is_string()) throw input_error("job needs a string 'command'");
        const std::string cmd = job["command"].get<std::string>();
        static const std::vector<std::string> known{"bands", "heights", "phi", "iso", "asymptotics", "verify", "oracle"};
        if (std::find(known.begin(), known.end(), cmd) == known.end()) throw input_error("unknown command '" + cmd + "'");
        for (auto it = job.begin(); it != job.end(); ++it) {
            static const std::vector<std::string> keys{"command", "k", "values", "qhat", "free", "options", "target", "other"};
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
                throw input_error("unknown field '" + it.key() + "'");
        }
        const options o = detail::resolve_options(job, flags);
        const auto ps = detail::parse_potential(job);
        if (o.format == "csv" && cmd != "asymptotics") throw input_error("csv output is only available for asymptotics");
        auto need = [&] {
            if (!ps.present()) throw input_error(cmd + " needs a potential ('values', 'qhat' or 'free')");
        };

        json result;
        if (cmd == "bands") {
            need();
            result = detail::bands_result(ps.general(), o);
        } else if (cmd == "heights") {
            need();
            result = detail::heights_result_json(ps, o);
        } else if (cmd == "phi") {
            need();
            result = detail::phi_result(ps.odd());
        } else if (cmd == "iso") {
            result = detail::iso_result(job, ps, o);
        } else if (cmd == "asymptotics") {
            need();
            const auto rep = convergence_study(ps.odd(), o.t_grid, {o.tol, 200});
            if (o.format == "csv") {
                out.output = detail::asymptotics_csv(rep);
                return out;
            }
            result = detail::asymptotics_result(rep);
        } else if (cmd == "verify") {
            result = detail::verify_result(job, ps, o);
        } else {
            need();
            result = detail::oracle_result(ps.general());
        }
        json doc;
        doc["header"] = {{"tool", "isospec"}, {"version", tool_version}, {"command", cmd}};
        doc["result"] = std::move(result);
        out.output = dump(doc);
    } catch (const input_error& e) {
        out = {2, "", std::string("input error: ") + e.what()};
    } catch (const json::exception& e) {
        out = {2, "", std::string("input error: ") + e.what()};
    } catch (const domain_error& e) {
        out = {1, "", std::string("error: ") + e.what()};
    }
    return out;
}

} // namespace isospec::cli
