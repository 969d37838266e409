#include "netkrig/factors.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"

namespace netkrig {

Eigen::MatrixXd window_means(const Eigen::MatrixXd& values, long w) {
    if (w < 1) throw std::invalid_argument("window must be >= 1, got " + std::to_string(w));
    const long n_w = values.cols() / w;
    if (n_w < 1)
        throw std::invalid_argument("window " + std::to_string(w) + " exceeds trace length " +
                                    std::to_string(values.cols()));
    Eigen::MatrixXd means(values.rows(), n_w);
    for (long k = 0; k < n_w; ++k)
        means.col(k) = values.middleCols(k * w, w).rowwise().mean();
    return means;
}

Eigen::MatrixXd window_means(const TraceSet& flows, long w) {
    return window_means(flows.values, w);
}

FactorModel fit_factor_matrix(const Eigen::MatrixXd& wm, long p) {
    const long J = wm.rows();
    if (p < 1 || p > J)
        throw std::invalid_argument("factor count p=" + std::to_string(p) + " outside 1.." +
                                    std::to_string(J));
    const Eigen::MatrixXd B = wm * wm.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    if (eig.info() != Eigen::Success)
        throw numerical_error("fit_factor_matrix", "eigendecomposition failed");

    FactorModel fm;
    fm.eigenvalues.resize(J);
    fm.F.resize(J, p);
    // solver returns ascending order; store descending
    for (long i = 0; i < J; ++i) fm.eigenvalues[i] = eig.eigenvalues()[J - 1 - i];
    for (long c = 0; c < p; ++c) {
        Eigen::VectorXd v = eig.eigenvectors().col(J - 1 - c);
        for (long r = 0; r < J; ++r) {
            if (std::abs(v[r]) > 1e-12) {  // sign convention: first nonzero positive
                if (v[r] < 0) v = -v;
                break;
            }
        }
        fm.F.col(c) = v;
    }
    return fm;
}

namespace {

void require_spectrum(const FactorModel& fm, long p) {
    if (fm.eigenvalues.size() == 0)
        throw std::invalid_argument(
            "factor model carries no eigenvalue spectrum (loaded from file?)");
    if (p < 1 || p > fm.eigenvalues.size())
        throw std::invalid_argument("p=" + std::to_string(p) + " outside 1.." +
                                    std::to_string(fm.eigenvalues.size()));
}

}  // namespace

double energy_captured(const FactorModel& fm, long p) {
    require_spectrum(fm, p);
    const double total = fm.eigenvalues.sum();
    if (total <= 0) return 1.0;
    return fm.eigenvalues.head(p).sum() / total;
}

double residual_energy(const FactorModel& fm, long p) {
    require_spectrum(fm, p);
    return fm.eigenvalues.tail(fm.eigenvalues.size() - p).sum();
}

void write_factor_matrix(const FactorModel& fm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    out << "p=" << fm.F.cols() << " J=" << fm.F.rows() << '\n';
    for (Eigen::Index r = 0; r < fm.F.rows(); ++r) {
        for (Eigen::Index c = 0; c < fm.F.cols(); ++c)
            out << (c ? "\t" : "") << format_double(fm.F(r, c));
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

FactorModel read_factor_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open factor file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw config_error(path + ": empty file");
    long p = -1, J = -1;
    {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("p=", 0) == 0)
                p = std::stol(tok.substr(2));
            else if (tok.rfind("J=", 0) == 0)
                J = std::stol(tok.substr(2));
            else
                throw config_error(path + ": unexpected header token '" + tok + "'");
        }
    }
    if (p < 1 || J < 1 || p > J)
        throw config_error(path + ": header must declare p and J with 1 <= p <= J");

    FactorModel fm;
    fm.F.resize(J, p);
    long r = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (r >= J) throw config_error(path + ": more than J=" + std::to_string(J) + " rows");
        auto fields = split(line, '\t');
        if (static_cast<long>(fields.size()) != p)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(p) + " values");
        for (long c = 0; c < p; ++c) {
            try {
                fm.F(r, c) = std::stod(trim(fields[c]));
            } catch (const std::exception&) {
                throw config_error(path + ":" + std::to_string(lineno) + ": malformed value '" +
                                   fields[c] + "'");
            }
        }
        ++r;
    }
    if (r != J)
        throw config_error(path + ": expected J=" + std::to_string(J) + " rows, got " +
                           std::to_string(r));
    const Eigen::MatrixXd gram = fm.F.transpose() * fm.F;
    if ((gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8)
        throw config_error(path + ": factor columns are not orthonormal");
    return fm;
}

}  // namespace netkrig
