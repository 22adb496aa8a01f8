#include "inflacert/inflacert.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "inflacert/certificate_io.hpp"
#include "inflacert/certify.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

struct ModeChoice {
    bool exact = false;
};

// explicit argument beats INFLACERT_MODE, which beats auto-detection
ModeChoice resolve_mode(const char* mode_arg, const std::string& u_text) {
    std::string mode = mode_arg ? mode_arg : "auto";
    if (mode.empty())
        mode = "auto";
    if (mode == "auto") {
        if (const char* env = std::getenv("INFLACERT_MODE")) {
            const std::string e = env;
            if (e == "exact" || e == "float")
                mode = e;
            else if (!e.empty() && e != "auto")
                throw inflacert::InvalidParameter(
                    "INFLACERT_MODE must be auto, exact or float");
        }
    }
    if (mode == "exact")
        return {true};
    if (mode == "float")
        return {false};
    if (mode != "auto")
        throw inflacert::InvalidParameter("mode must be auto, exact or float");
    // auto: exact when u is a Pythagorean ratio written as a fraction
    if (u_text.find('/') != std::string::npos) {
        try {
            const auto u = inflacert::rational_from_string(u_text);
            if (2 * u * u > 1 && u <= 1 && inflacert::family::pythagorean_ratio(u))
                return {true};
        } catch (const inflacert::ParseError&) {
        }
    }
    return {false};
}

template <class T>
inflacert::family::UParam<T> parse_u(const std::string& text);

template <>
inflacert::family::UParam<double> parse_u<double>(const std::string& text) {
    const auto r = inflacert::rational_from_string(text); // validates syntax
    auto up = inflacert::family::make_uparam(r.get_d());
    up.pythagorean = inflacert::family::pythagorean_ratio(r);
    return up;
}

template <>
inflacert::family::UParam<inflacert::Rational> parse_u<inflacert::Rational>(
    const std::string& text) {
    return inflacert::family::make_uparam_exact(
        inflacert::rational_from_string(text));
}

template <class T>
T parse_scalar(const std::string& text);

template <>
double parse_scalar<double>(const std::string& text) {
    return inflacert::Scalar<inflacert::Rational>::to_double(
        inflacert::rational_from_string(text));
}

template <>
inflacert::Rational parse_scalar<inflacert::Rational>(const std::string& text) {
    return inflacert::rational_from_string(text);
}

template <class T>
inflacert::family::CorrelatorPoint<T> parse_point(
    const std::string& text, const inflacert::family::UParam<T>& up) {
    if (text == "qplus-vertex")
        return inflacert::polytope::qplus_vertex(up);
    std::array<std::string, 4> parts;
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
        std::size_t end = text.find(',', start);
        if (k < 3 && end == std::string::npos)
            throw inflacert::InvalidParameter(
                "F must be 'qplus-vertex' or four comma-separated values");
        if (k == 3) {
            if (end != std::string::npos)
                throw inflacert::InvalidParameter("F has too many components");
            end = text.size();
        }
        parts[k] = text.substr(start, end - start);
        start = end + 1;
    }
    return {parse_scalar<T>(parts[0]), parse_scalar<T>(parts[1]),
            parse_scalar<T>(parts[2]), parse_scalar<T>(parts[3])};
}

inflacert::inflation::ConstraintOptions options_from_flags(unsigned flags) {
    inflacert::inflation::ConstraintOptions opt;
    opt.hierarchy = true; // base family, always on
    opt.higher_degree = flags & INFLACERT_CONSTRAINT_HIGHER_DEGREE;
    opt.lpi = flags & INFLACERT_CONSTRAINT_LPI;
    return opt;
}

inflacert_status status_of(const std::exception& e) {
    using namespace inflacert;
    if (dynamic_cast<const NegativeConditional*>(&e))
        return INFLACERT_ERR_NEGATIVE_CONDITIONAL;
    if (dynamic_cast<const NumericallyAmbiguous*>(&e))
        return INFLACERT_ERR_AMBIGUOUS;
    if (dynamic_cast<const LabelMismatch*>(&e))
        return INFLACERT_ERR_LABEL_MISMATCH;
    if (dynamic_cast<const EmptyPolytope*>(&e))
        return INFLACERT_ERR_EMPTY_POLYTOPE;
    if (dynamic_cast<const OutOfValidityRange*>(&e) ||
        dynamic_cast<const VertexOutsidePolytope*>(&e))
        return INFLACERT_ERR_OUT_OF_RANGE;
    if (dynamic_cast<const ParseError*>(&e))
        return INFLACERT_ERR_FORMAT;
    if (dynamic_cast<const InvalidParameter*>(&e))
        return INFLACERT_ERR_ARGUMENT;
    if (dynamic_cast<const Error*>(&e))
        return INFLACERT_ERR_INTERNAL;
    return INFLACERT_ERR_INTERNAL;
}

} // namespace

struct inflacert_cert {
    inflacert::io::CertificateFile file;
};

struct inflacert_sweep_report {
    inflacert::certify::SweepReport report;
};

extern "C" {

const char* inflacert_version(void) { return "1.0.0"; }

const char* inflacert_status_name(inflacert_status status) {
    switch (status) {
    case INFLACERT_OK: return "ok";
    case INFLACERT_FEASIBLE: return "feasible";
    case INFLACERT_ERR_ARGUMENT: return "argument-error";
    case INFLACERT_ERR_IO: return "io-error";
    case INFLACERT_ERR_FORMAT: return "format-error";
    case INFLACERT_ERR_NEGATIVE_CONDITIONAL: return "negative-conditional";
    case INFLACERT_ERR_AMBIGUOUS: return "numerically-ambiguous";
    case INFLACERT_ERR_LABEL_MISMATCH: return "label-mismatch";
    case INFLACERT_ERR_EMPTY_POLYTOPE: return "empty-polytope";
    case INFLACERT_ERR_OUT_OF_RANGE: return "out-of-range";
    case INFLACERT_COVERAGE_LOST: return "coverage-lost";
    case INFLACERT_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* inflacert_last_error(void) { return g_last_error.c_str(); }

void inflacert_string_free(char* text) { std::free(text); }
void inflacert_cert_free(inflacert_cert* cert) { delete cert; }
void inflacert_sweep_report_free(inflacert_sweep_report* report) { delete report; }

inflacert_status inflacert_certify(const char* u, const char* f, int t,
                                   const char* mode, unsigned flags,
                                   inflacert_cert** out) {
    if (out)
        *out = nullptr;
    if (!u || !f || !out || (t != 1 && t != -1)) {
        set_error("certify: u, f and out are required and t must be +1 or -1");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        const ModeChoice mc = resolve_mode(mode, u);
        const auto opt = options_from_flags(flags);
        inflacert::io::CertificateFile file;
        bool feasible = false;
        if (mc.exact) {
            const auto up = parse_u<inflacert::Rational>(u);
            const auto F = parse_point<inflacert::Rational>(f, up);
            const auto verdict = inflacert::certify::certify_point(up, F, t, opt);
            if (verdict.status == inflacert::certify::Verdict::LPFeasible)
                feasible = true;
            else
                file = inflacert::io::to_file(*verdict.certificate);
        } else {
            const auto up = parse_u<double>(u);
            const auto F = parse_point<double>(f, up);
            const auto verdict = inflacert::certify::certify_point(up, F, t, opt);
            if (verdict.status == inflacert::certify::Verdict::LPFeasible)
                feasible = true;
            else
                file = inflacert::io::to_file(*verdict.certificate);
        }
        if (feasible)
            return INFLACERT_FEASIBLE;
        *out = new inflacert_cert{std::move(file)};
        return INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    }
}

inflacert_status inflacert_cert_save(const inflacert_cert* cert, const char* path) {
    if (!cert || !path) {
        set_error("save: cert and path are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        inflacert::io::save(cert->file, path);
        return INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return INFLACERT_ERR_IO;
    }
}

inflacert_status inflacert_cert_load(const char* path, inflacert_cert** out) {
    if (out)
        *out = nullptr;
    if (!path || !out) {
        set_error("load: path and out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        auto file = inflacert::io::load(path);
        *out = new inflacert_cert{std::move(file)};
        return INFLACERT_OK;
    } catch (const inflacert::ParseError& e) {
        set_error(e.what());
        return INFLACERT_ERR_FORMAT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return INFLACERT_ERR_IO;
    }
}

inflacert_status inflacert_cert_margin(const inflacert_cert* cert, double* out) {
    if (!cert || !out) {
        set_error("margin: cert and out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        *out = inflacert::io::detail::parse_value<double>(cert->file.margin);
        return INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return INFLACERT_ERR_FORMAT;
    }
}

const char* inflacert_cert_u(const inflacert_cert* cert) {
    return cert ? cert->file.provenance.u.c_str() : nullptr;
}
int inflacert_cert_t(const inflacert_cert* cert) {
    return cert ? cert->file.provenance.t : 0;
}
const char* inflacert_cert_mode(const inflacert_cert* cert) {
    return cert ? cert->file.provenance.mode.c_str() : nullptr;
}

namespace {

template <class T>
double relaxed_margin_at(const inflacert::io::CertificateFile& file,
                         const std::string& u_text, const std::string& f_text,
                         int t) {
    const auto cert = inflacert::io::from_file<T>(file);
    const auto up = parse_u<T>(u_text);
    const auto F = parse_point<T>(f_text, up);
    const auto q4 = inflacert::family::eval_q(up, F);
    // the margin is a linear-algebra quantity; it stays evaluable even
    // when F has drifted slightly outside the polytope, so skip the
    // nonnegativity gate of condition_q
    const auto q3 = inflacert::certify::detail::conditional_slice_unchecked(q4, t);
    const auto prob = inflacert::inflation::build_inflation_lp(
        q3, inflacert::inflation::ConstraintOptions::parse(file.provenance.options));
    return inflacert::Scalar<T>::to_double(inflacert::lpcore::relaxed_margin(cert, prob));
}

} // namespace

inflacert_status inflacert_cert_verify_at(const inflacert_cert* cert,
                                          const char* u, const char* f, int t,
                                          const char* mode, double* margin_out) {
    if (!cert || !margin_out) {
        set_error("verify: cert and margin_out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        const std::string u_text = u && *u ? u : cert->file.provenance.u;
        std::string f_text;
        if (f && *f) {
            f_text = f;
        } else {
            const auto& F = cert->file.provenance.F;
            f_text = F[0] + "," + F[1] + "," + F[2] + "," + F[3];
        }
        const int t_eff = (t == 1 || t == -1) ? t : cert->file.provenance.t;
        std::string mode_text = mode && *mode ? mode : cert->file.provenance.mode;
        const ModeChoice mc = resolve_mode(mode_text.c_str(), u_text);
        const double margin =
            mc.exact ? relaxed_margin_at<inflacert::Rational>(cert->file, u_text,
                                                              f_text, t_eff)
                     : relaxed_margin_at<double>(cert->file, u_text, f_text, t_eff);
        *margin_out = margin;
        return margin > 0 ? INFLACERT_OK : INFLACERT_FEASIBLE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    }
}

inflacert_status inflacert_cert_inequality(const inflacert_cert* cert,
                                           char** text_out) {
    if (text_out)
        *text_out = nullptr;
    if (!cert || !text_out) {
        set_error("inequality: cert and text_out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        std::string text;
        if (cert->file.provenance.mode == "exact") {
            const auto c = inflacert::io::from_file<inflacert::Rational>(cert->file);
            text = inflacert::certify::export_inequality(c).render();
        } else {
            const auto c = inflacert::io::from_file<double>(cert->file);
            text = inflacert::certify::export_inequality(c).render();
        }
        *text_out = dup_string(text);
        if (!*text_out) {
            set_error("out of memory");
            return INFLACERT_ERR_INTERNAL;
        }
        return INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    }
}

inflacert_status inflacert_sweep(const char* u_start, const char* u_stop,
                                 const char* out_dir,
                                 inflacert_sweep_report** out) {
    if (out)
        *out = nullptr;
    if (!u_start || !u_stop || !out) {
        set_error("sweep: u_start, u_stop and out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        const double a = parse_scalar<double>(u_start);
        const double b = parse_scalar<double>(u_stop);
        inflacert::certify::SweepReport report;
        bool lost = false;
        try {
            report = inflacert::certify::sweep(a, b);
        } catch (const inflacert::certify::CoverageLost& e) {
            report = e.partial;
            lost = true;
        }
        if (out_dir && *out_dir) {
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            json manifest;
            manifest["format"] = "inflacert sweep manifest v1";
            manifest["u_from"] = report.u_from;
            manifest["u_to"] = report.u_to;
            manifest["reached_stop"] = report.reached_stop;
            manifest["frontier"] = report.frontier;
            manifest["segments"] = json::array();
            int idx = 0;
            for (const auto& seg : report.segments) {
                char name[64];
                std::snprintf(name, sizeof name, "segment-%03d.cert", idx);
                const fs::path path = fs::path(out_dir) / name;
                inflacert::io::save(inflacert::io::to_file(seg.certificate),
                                    path.string());
                json j;
                j["u_start"] = seg.u_start;
                j["u_end"] = seg.u_end;
                j["file"] = std::string(name);
                j["margin"] = seg.certificate.margin;
                manifest["segments"].push_back(j);
                ++idx;
            }
            std::ofstream mf(fs::path(out_dir) / "manifest.json");
            if (!mf)
                throw inflacert::Error("cannot write manifest");
            mf << manifest.dump(2) << "\n";
        }
        *out = new inflacert_sweep_report{std::move(report)};
        return lost ? INFLACERT_COVERAGE_LOST : INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    }
}

inflacert_status inflacert_sweep_reached(const inflacert_sweep_report* report,
                                         int* reached) {
    if (!report || !reached)
        return INFLACERT_ERR_ARGUMENT;
    *reached = report->report.reached_stop ? 1 : 0;
    return INFLACERT_OK;
}

inflacert_status inflacert_sweep_frontier(const inflacert_sweep_report* report,
                                          double* frontier) {
    if (!report || !frontier)
        return INFLACERT_ERR_ARGUMENT;
    *frontier = report->report.frontier;
    return INFLACERT_OK;
}

inflacert_status inflacert_sweep_segment_count(const inflacert_sweep_report* report,
                                               size_t* count) {
    if (!report || !count)
        return INFLACERT_ERR_ARGUMENT;
    *count = report->report.segments.size();
    return INFLACERT_OK;
}

inflacert_status inflacert_sweep_segment(const inflacert_sweep_report* report,
                                         size_t index, double* u_start,
                                         double* u_end) {
    if (!report || index >= report->report.segments.size())
        return INFLACERT_ERR_ARGUMENT;
    if (u_start)
        *u_start = report->report.segments[index].u_start;
    if (u_end)
        *u_end = report->report.segments[index].u_end;
    return INFLACERT_OK;
}

namespace {

template <class T>
std::string polytope_csv_impl(const inflacert::family::UParam<T>& up,
                              bool with_vertices, bool project) {
    using inflacert::Scalar;
    std::ostringstream os;
    const auto poly = inflacert::polytope::build_polytope(up);
    if (project) {
        os << "f2,f3\n";
        const auto pts = inflacert::polytope::slice_f2f3(poly);
        for (const auto& p : pts)
            os << Scalar<T>::str(p[0]) << "," << Scalar<T>::str(p[1]) << "\n";
        if (pts.size() > 2) // close the polygon
            os << Scalar<T>::str(pts[0][0]) << "," << Scalar<T>::str(pts[0][1])
               << "\n";
        return os.str();
    }
    os << "row,coef_f_ab,coef_f_ac,coef_f_bc,coef_f_abc,offset\n";
    for (int r = 0; r < 16; ++r) {
        const auto& row = poly.halfspaces.rows[r];
        os << r << "," << Scalar<T>::str(row.c[0]) << ","
           << Scalar<T>::str(row.c[1]) << "," << Scalar<T>::str(row.c[2]) << ","
           << Scalar<T>::str(row.c[3]) << "," << Scalar<T>::str(row.offset)
           << "\n";
    }
    if (with_vertices) {
        os << "\nf_ab,f_bc,f_ac,f_abc\n";
        for (const auto& v : inflacert::polytope::enumerate_vertices(poly))
            os << Scalar<T>::str(v.f_ab) << "," << Scalar<T>::str(v.f_bc) << ","
               << Scalar<T>::str(v.f_ac) << "," << Scalar<T>::str(v.f_abc)
               << "\n";
    }
    return os.str();
}

} // namespace

inflacert_status inflacert_polytope_csv(const char* u, int with_vertices,
                                        int project_f2f3, const char* mode,
                                        char** csv_out) {
    if (csv_out)
        *csv_out = nullptr;
    if (!u || !csv_out) {
        set_error("polytope: u and csv_out are required");
        return INFLACERT_ERR_ARGUMENT;
    }
    try {
        const ModeChoice mc = resolve_mode(mode, u);
        std::string csv;
        if (mc.exact)
            csv = polytope_csv_impl(parse_u<inflacert::Rational>(u),
                                    with_vertices, project_f2f3);
        else
            csv = polytope_csv_impl(parse_u<double>(u), with_vertices,
                                    project_f2f3);
        *csv_out = dup_string(csv);
        if (!*csv_out) {
            set_error("out of memory");
            return INFLACERT_ERR_INTERNAL;
        }
        return INFLACERT_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return status_of(e);
    }
}

} // extern "C"
