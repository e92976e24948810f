#include "pelab/dmx_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pelab {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_dmx_json(const DensityMatrix& rho) {
    const std::int64_t d = rho.dim();
    std::ostringstream out;
    auto emit_part = [&](bool real_part) {
        out << "[";
        for (std::int64_t i = 0; i < d; ++i) {
            if (i) out << ",";
            out << "[";
            for (std::int64_t j = 0; j < d; ++j) {
                if (j) out << ",";
                const Complex& c = rho.matrix()(i, j);
                out << format_g17(real_part ? c.real() : c.imag());
            }
            out << "]";
        }
        out << "]";
    };
    out << "{\"qubits\":" << rho.qubits() << ",\"re\":";
    emit_part(true);
    out << ",\"im\":";
    emit_part(false);
    out << "}";
    return out.str();
}

DensityMatrix from_dmx_json(const std::string& text, const Tolerances& tol) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("dmx-json parse error: ") + e.what());
    }
    if (!j.contains("qubits") || !j.contains("re") || !j.contains("im")) {
        throw input_error("dmx-json missing required field (qubits/re/im)");
    }
    const int qubits = j["qubits"].get<int>();
    if (qubits < 0 || qubits > 30) throw input_error("dmx-json qubit count out of range");
    const std::int64_t d = std::int64_t{1} << qubits;
    const auto& re = j["re"];
    const auto& im = j["im"];
    if (!re.is_array() || !im.is_array() || static_cast<std::int64_t>(re.size()) != d ||
        static_cast<std::int64_t>(im.size()) != d) {
        throw input_error("dmx-json matrix has wrong row count");
    }
    Matrix m(d, d);
    for (std::int64_t i = 0; i < d; ++i) {
        const auto& rrow = re[static_cast<size_t>(i)];
        const auto& irow = im[static_cast<size_t>(i)];
        if (static_cast<std::int64_t>(rrow.size()) != d ||
            static_cast<std::int64_t>(irow.size()) != d) {
            throw input_error("dmx-json matrix has wrong column count");
        }
        for (std::int64_t jcol = 0; jcol < d; ++jcol) {
            m(i, jcol) = Complex(rrow[static_cast<size_t>(jcol)].get<double>(),
                                 irow[static_cast<size_t>(jcol)].get<double>());
        }
    }
    try {
        return DensityMatrix::make(std::move(m), tol);
    } catch (const contract_error& e) {
        throw input_error(std::string("dmx-json state invalid: ") + e.what());
    }
}

void write_dmx_file(const std::string& path, const DensityMatrix& rho) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);
    out << to_dmx_json(rho) << "\n";
    if (!out) throw input_error("write failed: " + path);
}

DensityMatrix read_dmx_file(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_dmx_json(buf.str(), tol);
}

}  // namespace pelab
