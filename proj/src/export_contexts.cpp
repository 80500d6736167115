#include "mlmap/export_contexts.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mlmap {

std::vector<std::array<double, 2>> pca_2d(const std::vector<ContextRow>& rows) {
    if (rows.empty()) return {};
    const std::size_t n = rows.size();
    const std::size_t d = rows[0].values.size();
    Eigen::MatrixXd x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].values.size() != d) throw std::invalid_argument("pca_2d: ragged rows");
        for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
    Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::MatrixXd cov = (x.transpose() * x) / std::max<double>(1.0, static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pca_2d: eigendecomposition failed");

    // eigenvalues come out ascending; take the top two columns
    std::vector<std::array<double, 2>> out(n);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index col = static_cast<Eigen::Index>(d) - 1 - c;
        if (col < 0) {
            for (std::size_t i = 0; i < n; ++i) out[i][static_cast<std::size_t>(c)] = 0.0;
            continue;
        }
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        // sign convention: largest-magnitude entry is positive
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        Eigen::VectorXd proj = x * v;
        for (std::size_t i = 0; i < n; ++i) out[i][static_cast<std::size_t>(c)] = proj(static_cast<Eigen::Index>(i));
    }
    return out;
}

void write_context_csv(const std::vector<ContextRow>& rows, bool with_pca, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.precision(17);

    std::size_t d = rows.empty() ? 0 : rows[0].values.size();
    os << "id,label";
    for (std::size_t j = 0; j < d; ++j) os << ",c" << j;
    if (with_pca) os << ",pca0,pca1";
    os << "\n";

    std::vector<std::array<double, 2>> proj;
    if (with_pca) proj = pca_2d(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << rows[i].id << "," << rows[i].label;
        for (double v : rows[i].values) os << "," << v;
        if (with_pca) os << "," << proj[i][0] << "," << proj[i][1];
        os << "\n";
    }
}

}  // namespace mlmap
