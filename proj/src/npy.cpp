#include "ionheat/npy.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace ionheat::npy {

namespace {

constexpr char kMagic[] = "\x93NUMPY";

std::string header_dict(const fock::FockDims& dims) {
    return "{'descr': '<c16', 'fortran_order': False, 'shape': (" +
           std::to_string(dims.n_r) + ", " + std::to_string(dims.n_z) + ", " +
           std::to_string(dims.n_r) + ", " + std::to_string(dims.n_z) + "), }";
}

} // namespace

void save_matrix(const std::string& path, const fock::MatrixXcd& m,
                 const fock::FockDims& dims) {
    dims.validate();
    if (m.rows() != dims.dim() || m.cols() != dims.dim())
        throw std::invalid_argument("npy: matrix shape does not match dims");

    std::string dict = header_dict(dims);
    // Pad with spaces so that magic(6)+version(2)+len(2)+dict is a multiple of 64.
    const std::size_t base = 6 + 2 + 2;
    std::size_t total = base + dict.size() + 1;
    const std::size_t padded = (total + 63) / 64 * 64;
    dict.append(padded - total, ' ');
    dict.push_back('\n');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("npy: cannot open '" + path + "' for writing");
    out.write(kMagic, 6);
    const unsigned char version[2] = {1, 0};
    out.write(reinterpret_cast<const char*>(version), 2);
    const std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
    out.write(reinterpret_cast<const char*>(&hlen), 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));

    // C order over (r, z, r', z'); row index i = r*n_z + z is already C-ordered,
    // so stream row by row.
    std::vector<std::complex<double>> row(static_cast<std::size_t>(dims.dim()));
    for (int i = 0; i < dims.dim(); ++i) {
        for (int j = 0; j < dims.dim(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(row[0])));
    }
    if (!out) throw std::runtime_error("npy: write failed for '" + path + "'");
}

LoadedMatrix load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("npy: cannot open '" + path + "'");
    char magic[6];
    in.read(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0)
        throw std::runtime_error("npy: bad magic in '" + path + "'");
    unsigned char version[2];
    in.read(reinterpret_cast<char*>(version), 2);
    if (version[0] != 1)
        throw std::runtime_error("npy: unsupported format version");
    std::uint16_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), 2);
    std::string dict(hlen, '\0');
    in.read(dict.data(), hlen);

    if (dict.find("'<c16'") == std::string::npos)
        throw std::runtime_error("npy: expected complex128 payload");
    if (dict.find("False") == std::string::npos)
        throw std::runtime_error("npy: expected C-ordered payload");

    const auto open_paren = dict.find('(');
    const auto close_paren = dict.find(')', open_paren);
    if (open_paren == std::string::npos || close_paren == std::string::npos)
        throw std::runtime_error("npy: malformed shape");
    std::string shape = dict.substr(open_paren + 1, close_paren - open_paren - 1);
    std::vector<int> axes;
    std::size_t pos = 0;
    while (pos < shape.size()) {
        while (pos < shape.size() && (shape[pos] == ' ' || shape[pos] == ',')) ++pos;
        if (pos >= shape.size()) break;
        std::size_t used = 0;
        axes.push_back(std::stoi(shape.substr(pos), &used));
        pos += used;
    }
    if (axes.size() != 4 || axes[0] != axes[2] || axes[1] != axes[3])
        throw std::runtime_error("npy: expected shape (n_r, n_z, n_r, n_z)");

    LoadedMatrix out;
    out.dims = fock::FockDims{axes[0], axes[1]};
    out.dims.validate();
    const int dim = out.dims.dim();
    out.matrix.resize(dim, dim);
    std::vector<std::complex<double>> row(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(row[0])));
        for (int j = 0; j < dim; ++j) out.matrix(i, j) = row[static_cast<std::size_t>(j)];
    }
    if (!in) throw std::runtime_error("npy: truncated payload in '" + path + "'");
    return out;
}

} // namespace ionheat::npy
