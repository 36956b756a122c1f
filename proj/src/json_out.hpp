#pragma once

#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace dirspec {

// Deterministic JSON emission: fixed key order (callers emit keys sorted),
// every double printed with 17 significant digits, complex as [re, im].
class JsonOut {
public:
    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static std::string num(int v) { return std::to_string(v); }

    static std::string str(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                default: out += c;
            }
        }
        out += '"';
        return out;
    }

    static std::string boolean(bool b) { return b ? "true" : "false"; }

    static std::string complex_pair(std::complex<double> z) {
        return "[" + num(z.real()) + "," + num(z.imag()) + "]";
    }

    JsonOut& field(const std::string& key, const std::string& raw_value) {
        items_.push_back(str(key) + ":" + raw_value);
        return *this;
    }

    std::string object() const {
        std::string out = "{";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (i) out += ',';
            out += items_[i];
        }
        out += '}';
        return out;
    }

    static std::string array(const std::vector<std::string>& raw_values) {
        std::string out = "[";
        for (std::size_t i = 0; i < raw_values.size(); ++i) {
            if (i) out += ',';
            out += raw_values[i];
        }
        out += ']';
        return out;
    }

private:
    std::vector<std::string> items_;
};

} // namespace dirspec
