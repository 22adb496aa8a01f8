#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "inflacert/lpcore.hpp"

// Plain-text certificate files.  Values are decimal strings in float
// mode and lowest-terms base-10 rationals in exact mode; the trailing
// checksum guards against accidental edits.  Round-trips bit-exactly.

namespace inflacert::io {

struct CertificateFile {
    int version = 1;
    lpcore::Provenance provenance;
    std::vector<std::pair<std::string, std::string>> rows; // label, value
    std::string margin;
};

std::uint64_t fnv1a(const std::string& data);

std::string emit(const CertificateFile& file);
CertificateFile parse_text(const std::string& text); // throws ParseError

void save(const CertificateFile& file, const std::string& path);
CertificateFile load(const std::string& path);

template <class T>
CertificateFile to_file(const lpcore::FarkasCertificate<T>& cert) {
    CertificateFile f;
    f.provenance = cert.provenance;
    f.rows.reserve(cert.y.size());
    for (const auto& [label, val] : cert.y)
        f.rows.emplace_back(label, Scalar<T>::str(val));
    f.margin = Scalar<T>::str(cert.margin);
    return f;
}

namespace detail {

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError("bad float value '" + s + "'");
    return v;
}

template <class T>
T parse_value(const std::string& s);

template <>
inline double parse_value<double>(const std::string& s) {
    if (s.find('/') != std::string::npos)
        return Scalar<Rational>::to_double(rational_from_string(s));
    return parse_double(s);
}

template <>
inline Rational parse_value<Rational>(const std::string& s) {
    return rational_from_string(s);
}

} // namespace detail

// Exact certificates only load into Rational; float certificates load
// into double, and exact ones may also be down-converted to double for
// float-mode relaxed evaluation.
template <class T>
lpcore::FarkasCertificate<T> from_file(const CertificateFile& f) {
    if constexpr (Scalar<T>::exact) {
        if (f.provenance.mode != "exact")
            throw ParseError("certificate mode '" + f.provenance.mode +
                             "' cannot load as exact");
    }
    lpcore::FarkasCertificate<T> cert;
    cert.provenance = f.provenance;
    cert.y.reserve(f.rows.size());
    for (const auto& [label, val] : f.rows)
        cert.y.emplace_back(label, detail::parse_value<T>(val));
    cert.margin = detail::parse_value<T>(f.margin);
    return cert;
}

} // namespace inflacert::io
