#include "fmd/embedder.hpp"

#include <zlib.h>

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fmd/errors.hpp"
#include "text_util.hpp"

namespace fmd {

using detail::fmt17;
using detail::parse_double;
using detail::parse_int;
using detail::split_ws;

void EmbedderModel::validate() const {
    if (input_height < 1 || input_width < 1) throw ValidationError("model has empty input dims");
    if (latent_dim < 1) throw ValidationError("model latent_dim must be >= 1");
    const Eigen::Index d = latent_dim;
    const Eigen::Index n_dims = dims();
    if (mean_image.size() != n_dims || components.rows() != d || components.cols() != n_dims ||
        explained_variance.size() != d) {
        throw ValidationError("model field shapes are inconsistent");
    }
    const Eigen::MatrixXd gram = components * components.transpose();
    const double ortho_err =
        (gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-8) {
        throw ValidationError("model components are not orthonormal (max deviation " +
                              std::to_string(ortho_err) + ")");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (explained_variance[i] < -1e-12) {
            throw ValidationError("explained_variance has a negative entry");
        }
        if (i > 0 && explained_variance[i] > explained_variance[i - 1] + 1e-12) {
            throw ValidationError("explained_variance is not non-increasing");
        }
    }
}

EmbedderModel fit_pca_data(const Eigen::MatrixXd& X, int height, int width, int d) {
    const Eigen::Index n = X.rows();
    const Eigen::Index n_dims = X.cols();
    if (static_cast<Eigen::Index>(height) * width * 3 != n_dims) {
        throw DimensionMismatch("flattened image size does not match height*width*3");
    }
    if (d < 1 || d > n_dims) {
        throw DimensionMismatch("latent dim " + std::to_string(d) + " outside [1, " +
                                std::to_string(n_dims) + "]");
    }
    if (n < d + 1) {
        throw InsufficientData("PCA with d=" + std::to_string(d) + " needs at least " +
                               std::to_string(d + 1) + " images, got " + std::to_string(n));
    }

    EmbedderModel model;
    model.input_height = height;
    model.input_width = width;
    model.latent_dim = d;
    model.mean_image = X.colwise().mean();

    // SVD of the centered data: right singular vectors are the eigenvectors
    // of the sample covariance, eigenvalues are s^2/(n-1).
    Eigen::MatrixXd centered = X.rowwise() - model.mean_image.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw EigenFailure("SVD did not converge in fit_pca");

    model.components = svd.matrixV().leftCols(d).transpose();
    model.explained_variance =
        svd.singularValues().head(d).array().square() / static_cast<double>(n - 1);
    model.explained_variance = model.explained_variance.cwiseMax(0.0);

    // Deterministic sign: the largest-magnitude entry of each component is
    // non-negative (first such entry wins on ties).
    for (int i = 0; i < d; ++i) {
        Eigen::Index arg = 0;
        model.components.row(i).cwiseAbs().maxCoeff(&arg);
        if (model.components(i, arg) < 0.0) model.components.row(i) = -model.components.row(i);
    }
    return model;
}

EmbedderModel fit_pca(const std::vector<MotionImage>& images, int d) {
    if (images.empty()) throw InsufficientData("fit_pca needs a non-empty image set");
    const int height = images.front().height;
    const int width = images.front().width;
    const Eigen::Index n_dims = images.front().pixels.size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(images.size()), n_dims);
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].height != height || images[i].width != width) {
            throw DimensionMismatch("training images have mixed dimensions");
        }
        X.row(static_cast<Eigen::Index>(i)) = images[i].pixels.transpose();
    }
    return fit_pca_data(X, height, width, d);
}

FeatureVector embed(const EmbedderModel& model, const MotionImage& image) {
    if (image.height != model.input_height || image.width != model.input_width) {
        throw DimensionMismatch("image is " + std::to_string(image.height) + "x" +
                                std::to_string(image.width) + " but model expects " +
                                std::to_string(model.input_height) + "x" +
                                std::to_string(model.input_width));
    }
    return model.components * (image.pixels - model.mean_image);
}

Eigen::MatrixXd embed_all(const EmbedderModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.dims()) {
        throw DimensionMismatch("flattened image rows do not match the model's input size");
    }
    return (X.rowwise() - model.mean_image.transpose()) * model.components.transpose();
}

Eigen::MatrixXd load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing FEAT1 header");
    ++lineno;
    const auto header = split_ws(line);
    if (header.size() != 3 || header[0] != "FEAT1") {
        throw ParseError(lineno, "expected 'FEAT1 <n> <d>'");
    }
    const long long n = parse_int(header[1], lineno);
    const long long d = parse_int(header[2], lineno);
    if (n < 0) throw ParseError(lineno, "feature count must be >= 0");
    if (d < 1) throw ParseError(lineno, "feature dimension must be >= 1");

    Eigen::MatrixXd features(n, d);
    for (long long i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw ParseError(lineno, "expected " + std::to_string(n) + " feature rows, got " +
                                         std::to_string(i));
        }
        ++lineno;
        const auto values = split_ws(line);
        if (static_cast<long long>(values.size()) != d) {
            throw DimensionMismatch("row " + std::to_string(i) + " has " +
                                    std::to_string(values.size()) + " values, header declares " +
                                    std::to_string(d));
        }
        for (long long k = 0; k < d; ++k) features(i, k) = parse_double(values[k], lineno);
    }
    return features;
}

void save_features(const Eigen::MatrixXd& features, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << "FEAT1 " << features.rows() << ' ' << features.cols() << '\n';
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        for (Eigen::Index k = 0; k < features.cols(); ++k) {
            if (k) out << ' ';
            out << fmt17(features(i, k));
        }
        out << '\n';
    }
    if (!out) throw IOError("failed writing '" + path + "'");
}

namespace {

void append_vector_line(std::string& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt17(v[i]);
    }
    out += '\n';
}

std::uint32_t crc_of(const std::string& bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

void save_model(const EmbedderModel& model, const std::string& path) {
    model.validate();
    std::string payload;
    payload += "FMDMODEL1 " + std::to_string(model.input_height) + ' ' +
               std::to_string(model.input_width) + ' ' + std::to_string(model.latent_dim) + '\n';
    append_vector_line(payload, model.mean_image);
    for (int i = 0; i < model.latent_dim; ++i) {
        append_vector_line(payload, model.components.row(i).transpose());
    }
    append_vector_line(payload, model.explained_variance);

    char crc_line[32];
    std::snprintf(crc_line, sizeof(crc_line), "CRC32 %08x\n", crc_of(payload));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out << payload << crc_line;
    if (!out) throw IOError("failed writing '" + path + "'");
}

EmbedderModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();

    // The checksum line is the last line of the file; the checksum covers
    // every byte before it.
    const std::size_t crc_pos = content.rfind("CRC32 ");
    if (crc_pos == std::string::npos || (crc_pos != 0 && content[crc_pos - 1] != '\n')) {
        throw ParseError(0, "missing CRC32 trailer (truncated model file?)");
    }
    const std::string payload = content.substr(0, crc_pos);
    const std::string crc_line = detail::trim(content.substr(crc_pos));
    const auto crc_tokens = split_ws(crc_line);
    if (crc_tokens.size() != 2) throw ParseError(0, "malformed CRC32 trailer");
    const std::uint32_t stored =
        static_cast<std::uint32_t>(std::strtoul(crc_tokens[1].c_str(), nullptr, 16));
    if (crc_of(payload) != stored) {
        throw ChecksumMismatch("model file checksum mismatch in '" + path + "'");
    }

    std::istringstream ps(payload);
    std::string line;
    long lineno = 0;
    if (!std::getline(ps, line)) throw ParseError(1, "missing FMDMODEL1 header");
    ++lineno;
    const auto header = split_ws(line);
    if (header.size() != 4 || header[0] != "FMDMODEL1") {
        throw ParseError(lineno, "expected 'FMDMODEL1 <H> <W> <d>'");
    }
    EmbedderModel model;
    model.input_height = static_cast<int>(parse_int(header[1], lineno));
    model.input_width = static_cast<int>(parse_int(header[2], lineno));
    model.latent_dim = static_cast<int>(parse_int(header[3], lineno));
    if (model.input_height < 1 || model.input_width < 1 || model.latent_dim < 1) {
        throw ParseError(lineno, "model dimensions must be positive");
    }
    const Eigen::Index n_dims = model.dims();

    auto read_vector = [&](Eigen::Index expected) {
        if (!std::getline(ps, line)) throw ParseError(lineno, "model file truncated");
        ++lineno;
        const auto values = split_ws(line);
        if (static_cast<Eigen::Index>(values.size()) != expected) {
            throw ParseError(lineno, "expected " + std::to_string(expected) + " values, got " +
                                         std::to_string(values.size()));
        }
        Eigen::VectorXd v(expected);
        for (Eigen::Index i = 0; i < expected; ++i) v[i] = parse_double(values[i], lineno);
        return v;
    };

    model.mean_image = read_vector(n_dims);
    model.components.resize(model.latent_dim, n_dims);
    for (int i = 0; i < model.latent_dim; ++i) {
        model.components.row(i) = read_vector(n_dims).transpose();
    }
    model.explained_variance = read_vector(model.latent_dim).cwiseMax(0.0);
    model.validate();
    return model;
}

}  // namespace fmd
