#include "semeq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "semeq/errors.hpp"

namespace semeq {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return buf.str();
}

void save_complex_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                         const std::string& comment) {
    std::string out;
    out.reserve(static_cast<std::size_t>(m.size()) * 48 + 64);
    if (!comment.empty()) {
        out += "# ";
        out += comment;
        out += '\n';
    }
    out += std::to_string(m.rows());
    out += ' ';
    out += std::to_string(m.cols());
    out += '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            out += format_double(m(i, j).real());
            out += ' ';
            out += format_double(m(i, j).imag());
            out += '\n';
        }
    }
    write_text_file(path, out);
}

Eigen::MatrixXcd load_complex_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    while (in.peek() == '#') std::getline(in, line);
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw IoError(path.string() + ": bad matrix header, expected 'rows cols'");
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            double re = 0;
            double im = 0;
            if (!(in >> re >> im))
                throw IoError(path.string() + ": truncated at entry (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
            m(i, j) = {re, im};
        }
    }
    return m;
}

}  // namespace semeq
