// Command-line front end for the certification library.  Talks to the
// core exclusively through the C API.
//
// Exit codes:
//   certify:     0 = infeasibility certificate found, 1 = LP feasible,
//                2 = usage or runtime error
//   sweep:       0 = target reached, 3 = coverage lost, 2 = error
//   polytope:    0 = emitted (possibly with an empty vertex section)
//   export-ineq: 0 = written, 2 = error
//   verify:      0 = positive margin, 1 = nonpositive, 2 = error

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "inflacert/inflacert.h"

namespace {

int fail(inflacert_status status) {
    std::cerr << "error (" << inflacert_status_name(status)
              << "): " << inflacert_last_error() << "\n";
    return 2;
}

bool write_text_file(const std::string& path, const char* text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        return false;
    out << text;
    return bool(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"triangle-network nonlocality certification"};
    app.require_subcommand(1);

    // certify
    std::string c_u, c_f = "qplus-vertex", c_out;
    int c_t = -1;
    bool c_exact = false, c_no_lpi = false, c_no_hd = false;
    auto* certify = app.add_subcommand(
        "certify", "build and solve the feasibility program at one point");
    certify->add_option("--u", c_u, "family parameter (decimal or p/q)")
        ->required();
    certify->add_option("--F", c_f,
                        "correlators F_AB,F_BC,F_AC,F_ABC or 'qplus-vertex'");
    certify->add_option("--t", c_t, "conditional selector (+1 or -1)")
        ->check(CLI::IsMember({1, -1}));
    certify->add_flag("--exact", c_exact, "force exact rational arithmetic");
    certify->add_flag("--no-lpi", c_no_lpi, "drop the LPI constraint family");
    certify->add_flag("--no-hd", c_no_hd, "drop the higher-degree family");
    certify->add_option("-o,--output", c_out, "certificate file to write");

    // sweep
    std::string s_from, s_to, s_dir;
    auto* sweep = app.add_subcommand(
        "sweep", "chain certificates along u, each covering its whole polytope");
    sweep->add_option("--from", s_from, "starting u")->required();
    sweep->add_option("--to", s_to, "target u")->required();
    sweep->add_option("-o,--output", s_dir, "report directory")->required();

    // polytope
    std::string p_u, p_out;
    bool p_vertices = false, p_project = false, p_exact = false;
    auto* polytope = app.add_subcommand(
        "polytope", "emit the halfspace table, vertices or the 2-d slice");
    polytope->add_option("--u", p_u, "family parameter")->required();
    polytope->add_flag("--vertices", p_vertices, "append the vertex list");
    polytope->add_flag("--project-f2f3", p_project,
                       "emit the symmetric-slice boundary polyline instead");
    polytope->add_flag("--exact", p_exact, "exact rational output");
    polytope->add_option("-o,--output", p_out, "CSV file (default stdout)");

    // export-ineq
    std::string e_in, e_out;
    auto* exportineq = app.add_subcommand(
        "export-ineq", "render a certificate as a polynomial inequality");
    exportineq->add_option("-i,--input", e_in, "certificate file")->required();
    exportineq->add_option("-o,--output", e_out, "text file (default stdout)");

    // verify
    std::string v_in, v_u, v_f;
    int v_t = 0;
    std::string v_mode;
    auto* verify = app.add_subcommand(
        "verify", "re-evaluate a certificate's relaxed margin");
    verify->add_option("-i,--input", v_in, "certificate file")->required();
    verify->add_option("--u", v_u, "evaluate at this u (default: provenance)");
    verify->add_option("--F", v_f, "evaluate at these correlators");
    verify->add_option("--t", v_t, "conditional selector")
        ->check(CLI::IsMember({1, -1}));
    verify->add_option("--mode", v_mode, "auto, float or exact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (certify->parsed()) {
        unsigned flags = INFLACERT_CONSTRAINTS_ALL;
        if (c_no_lpi)
            flags &= ~INFLACERT_CONSTRAINT_LPI;
        if (c_no_hd)
            flags &= ~INFLACERT_CONSTRAINT_HIGHER_DEGREE;
        inflacert_cert* cert = nullptr;
        const inflacert_status st = inflacert_certify(
            c_u.c_str(), c_f.c_str(), c_t, c_exact ? "exact" : "auto", flags,
            &cert);
        if (st == INFLACERT_FEASIBLE) {
            std::cout << "feasible: no infeasibility certificate at this point\n";
            return 1;
        }
        if (st != INFLACERT_OK)
            return fail(st);
        double margin = 0;
        inflacert_cert_margin(cert, &margin);
        std::cout << "nonlocal: certificate margin " << margin << "\n";
        if (!c_out.empty()) {
            const inflacert_status sv = inflacert_cert_save(cert, c_out.c_str());
            if (sv != INFLACERT_OK) {
                inflacert_cert_free(cert);
                return fail(sv);
            }
            std::cout << "wrote " << c_out << "\n";
        }
        inflacert_cert_free(cert);
        return 0;
    }

    if (sweep->parsed()) {
        inflacert_sweep_report* report = nullptr;
        const inflacert_status st = inflacert_sweep(s_from.c_str(), s_to.c_str(),
                                                    s_dir.c_str(), &report);
        if (st != INFLACERT_OK && st != INFLACERT_COVERAGE_LOST)
            return fail(st);
        double frontier = 0;
        size_t n = 0;
        inflacert_sweep_frontier(report, &frontier);
        inflacert_sweep_segment_count(report, &n);
        std::cout << (st == INFLACERT_OK ? "reached target" : "coverage lost")
                  << " at u = " << frontier << " after " << n << " segment(s); "
                  << "report in " << s_dir << "\n";
        inflacert_sweep_report_free(report);
        return st == INFLACERT_OK ? 0 : 3;
    }

    if (polytope->parsed()) {
        char* csv = nullptr;
        const inflacert_status st = inflacert_polytope_csv(
            p_u.c_str(), p_vertices ? 1 : 0, p_project ? 1 : 0,
            p_exact ? "exact" : "auto", &csv);
        if (st != INFLACERT_OK)
            return fail(st);
        if (p_vertices) {
            // an empty vertex section is worth a note but not an error
            const std::string text = csv;
            const auto pos = text.find("\nf_ab,");
            if (pos != std::string::npos && pos + 1 >= text.find_last_of('\n'))
                std::cout << "note: polytope is empty at u = " << p_u << "\n";
        }
        const bool ok = write_text_file(p_out, csv);
        inflacert_string_free(csv);
        if (!ok) {
            std::cerr << "error: cannot write " << p_out << "\n";
            return 2;
        }
        return 0;
    }

    if (exportineq->parsed()) {
        inflacert_cert* cert = nullptr;
        inflacert_status st = inflacert_cert_load(e_in.c_str(), &cert);
        if (st != INFLACERT_OK)
            return fail(st);
        char* text = nullptr;
        st = inflacert_cert_inequality(cert, &text);
        inflacert_cert_free(cert);
        if (st != INFLACERT_OK)
            return fail(st);
        const bool ok = write_text_file(e_out, text);
        inflacert_string_free(text);
        if (!ok) {
            std::cerr << "error: cannot write " << e_out << "\n";
            return 2;
        }
        return 0;
    }

    if (verify->parsed()) {
        inflacert_cert* cert = nullptr;
        inflacert_status st = inflacert_cert_load(v_in.c_str(), &cert);
        if (st != INFLACERT_OK)
            return fail(st);
        double margin = 0;
        st = inflacert_cert_verify_at(cert, v_u.empty() ? nullptr : v_u.c_str(),
                                      v_f.empty() ? nullptr : v_f.c_str(), v_t,
                                      v_mode.empty() ? nullptr : v_mode.c_str(),
                                      &margin);
        inflacert_cert_free(cert);
        if (st != INFLACERT_OK && st != INFLACERT_FEASIBLE)
            return fail(st);
        std::printf("margin: %.17g\n", margin);
        return st == INFLACERT_OK ? 0 : 1;
    }

    return 2;
}
