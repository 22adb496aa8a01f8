#include "inflacert/certificate_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace inflacert::io {

namespace {

constexpr const char* kHeader = "inflacert certificate v";

std::string checksum_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string expect_prefix(const std::string& line, const std::string& prefix) {
    if (line.rfind(prefix, 0) != 0)
        throw ParseError("expected '" + prefix + "...' but found '" + line + "'");
    return line.substr(prefix.size());
}

} // namespace

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string emit(const CertificateFile& file) {
    std::ostringstream os;
    os << kHeader << file.version << "\n";
    os << "mode: " << file.provenance.mode << "\n";
    os << "u: " << file.provenance.u << "\n";
    os << "t: " << (file.provenance.t >= 0 ? "+1" : "-1") << "\n";
    os << "F: " << file.provenance.F[0] << "," << file.provenance.F[1] << ","
       << file.provenance.F[2] << "," << file.provenance.F[3] << "\n";
    os << "options: " << file.provenance.options << "\n";
    os << "rows: " << file.rows.size() << "\n";
    for (const auto& [label, value] : file.rows)
        os << label << " " << value << "\n";
    os << "margin: " << file.margin << "\n";
    std::string body = os.str();
    body += "checksum: " + checksum_hex(fnv1a(body)) + "\n";
    return body;
}

CertificateFile parse_text(const std::string& text) {
    std::istringstream is(text);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line))
        lines.push_back(line);
    if (lines.size() < 9)
        throw ParseError("certificate file too short");

    const std::string& last = lines.back();
    const std::string stored = expect_prefix(last, "checksum: ");
    const std::size_t body_len = text.rfind("checksum: ");
    if (body_len == std::string::npos)
        throw ParseError("missing checksum line");
    const std::string body = text.substr(0, body_len);
    if (checksum_hex(fnv1a(body)) != stored)
        throw ParseError("checksum mismatch: file was modified or truncated");

    CertificateFile f;
    std::size_t i = 0;
    const std::string version = expect_prefix(lines[i++], kHeader);
    f.version = std::atoi(version.c_str());
    if (f.version != 1)
        throw ParseError("unsupported certificate version " + version);
    f.provenance.mode = expect_prefix(lines[i++], "mode: ");
    if (f.provenance.mode != "float" && f.provenance.mode != "exact")
        throw ParseError("bad mode '" + f.provenance.mode + "'");
    f.provenance.u = expect_prefix(lines[i++], "u: ");
    const std::string t = expect_prefix(lines[i++], "t: ");
    if (t == "+1")
        f.provenance.t = 1;
    else if (t == "-1")
        f.provenance.t = -1;
    else
        throw ParseError("bad t '" + t + "'");
    const std::string fline = expect_prefix(lines[i++], "F: ");
    {
        std::size_t start = 0;
        for (int k = 0; k < 4; ++k) {
            std::size_t end = fline.find(',', start);
            if (k < 3 && end == std::string::npos)
                throw ParseError("F needs four comma-separated values");
            if (k == 3)
                end = fline.size();
            f.provenance.F[k] = fline.substr(start, end - start);
            start = end + 1;
        }
    }
    f.provenance.options = expect_prefix(lines[i++], "options: ");
    const long n_rows = std::atol(expect_prefix(lines[i++], "rows: ").c_str());
    if (n_rows < 0 || i + n_rows + 2 != lines.size())
        throw ParseError("row count does not match file length");
    f.rows.reserve(n_rows);
    for (long r = 0; r < n_rows; ++r) {
        const std::string& row = lines[i++];
        const std::size_t sp = row.find(' ');
        if (sp == std::string::npos)
            throw ParseError("bad row line '" + row + "'");
        f.rows.emplace_back(row.substr(0, sp), row.substr(sp + 1));
    }
    f.margin = expect_prefix(lines[i++], "margin: ");
    return f;
}

void save(const CertificateFile& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out << emit(file);
    if (!out)
        throw Error("write failed for '" + path + "'");
}

CertificateFile load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str());
}

} // namespace inflacert::io
