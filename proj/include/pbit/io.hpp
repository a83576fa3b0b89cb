#ifndef PBIT_IO_HPP
#define PBIT_IO_HPP

#include <charconv>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/ising.hpp"

namespace pbit {

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_real(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

namespace io {

/// Whitespace-split tokens of one line with any `#` comment removed.
inline std::vector<std::string> tokenize(std::string_view line) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
    }
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) {
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

template <typename T>
T parse_number(const std::string &tok, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw parse_error("bad number '" + tok + "'", line);
    }
    return value;
}

/// Called for every line whose keyword is not part of the instance format.
/// Return false to reject the line as unknown.
using ExtraLineHandler = std::function<bool(const std::vector<std::string> &tokens, std::size_t line)>;

/// Writes `ising <n>`, then `h <i> <value>` for nonzero biases, then `e <i> <j> <value>`.
inline void write_model(std::ostream &out, const IsingModel &model) {
    out << "ising " << model.size() << "\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.biases()[i] != 0.0) {
            out << "h " << i << " " << format_real(model.biases()[i]) << "\n";
        }
    }
    for (const auto &e : model.edges()) {
        out << "e " << e.i << " " << e.j << " " << format_real(e.weight) << "\n";
    }
}

inline IsingModel read_model(std::istream &in, const ExtraLineHandler &extra = {}) {
    std::size_t n = 0;
    bool have_header = false;
    std::vector<double> biases;
    std::vector<Coupling> couplings;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize(line);
        if (tok.empty()) {
            continue;
        }
        if (tok[0] == "ising") {
            if (have_header || tok.size() != 2) {
                throw parse_error("expected a single 'ising <n>' header", lineno);
            }
            n = parse_number<std::size_t>(tok[1], lineno);
            biases.assign(n, 0.0);
            have_header = true;
            continue;
        }
        if (tok[0] == "h" || tok[0] == "e") {
            if (!have_header) {
                throw parse_error("'" + tok[0] + "' line before 'ising' header", lineno);
            }
        }
        if (tok[0] == "h") {
            if (tok.size() != 3) {
                throw parse_error("expected 'h <i> <value>'", lineno);
            }
            auto i = parse_number<std::size_t>(tok[1], lineno);
            if (i >= n) {
                throw parse_error("bias index out of range", lineno);
            }
            biases[i] = parse_number<double>(tok[2], lineno);
        } else if (tok[0] == "e") {
            if (tok.size() != 4) {
                throw parse_error("expected 'e <i> <j> <value>'", lineno);
            }
            auto i = parse_number<std::size_t>(tok[1], lineno);
            auto j = parse_number<std::size_t>(tok[2], lineno);
            if (i >= j || j >= n) {
                throw parse_error("edge indices must satisfy i < j < n", lineno);
            }
            couplings.push_back(
                {static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), parse_number<double>(tok[3], lineno)});
        } else if (!extra || !extra(tok, lineno)) {
            throw parse_error("unknown keyword '" + tok[0] + "'", lineno);
        }
    }
    if (!have_header) {
        throw parse_error("missing 'ising <n>' header", lineno);
    }
    return IsingModel(n, std::move(couplings), std::move(biases));
}

inline std::string to_string(const IsingModel &model) {
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

}  // namespace io
}  // namespace pbit

#endif  // PBIT_IO_HPP
