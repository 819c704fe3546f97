#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fmd/motion_image.hpp"

namespace fmd {

using FeatureVector = Eigen::VectorXd;

// Linear embedder fitted to motion images of one fixed size: an orthonormal
// basis of the top-d principal directions of the training set. Immutable
// after fitting.
struct EmbedderModel {
    int input_height = 0;
    int input_width = 0;
    int latent_dim = 0;
    Eigen::VectorXd mean_image;          // H*W*3
    Eigen::MatrixXd components;          // d x H*W*3, orthonormal rows
    Eigen::VectorXd explained_variance;  // d, non-increasing, >= 0

    int dims() const { return input_height * input_width * 3; }

    // Throws ValidationError when shapes disagree, rows are not orthonormal
    // within 1e-8, or explained_variance is negative/increasing.
    void validate() const;
};

// Fits the top-d principal components of the flattened images (sample
// covariance with n-1 denominator). Requires at least d+1 images of
// identical dimensions and 1 <= d <= H*W*3. Component signs are normalized
// so each component's largest-magnitude entry is non-negative.
EmbedderModel fit_pca(const std::vector<MotionImage>& images, int d);

// Same fit on pre-flattened rows (one image per row of X).
EmbedderModel fit_pca_data(const Eigen::MatrixXd& X, int height, int width, int d);

// Projects one image: values[i] = <flatten(image) - mean, component_i>.
FeatureVector embed(const EmbedderModel& model, const MotionImage& image);

// Batch projection of pre-flattened rows; returns n x d.
Eigen::MatrixXd embed_all(const EmbedderModel& model, const Eigen::MatrixXd& X);

// FEAT1 text format: `FEAT1 <n> <d>` then n lines of d reals.
// Rows of the matrix are feature vectors; n = 0 gives a 0 x d matrix.
Eigen::MatrixXd load_features(const std::string& path);
void save_features(const Eigen::MatrixXd& features, const std::string& path);

// Model file format:
//   FMDMODEL1 <H> <W> <d>
//   mean image line, d component lines, explained variance line
//   CRC32 <hex>  (zlib crc32 over every preceding byte of the file)
EmbedderModel load_model(const std::string& path);
void save_model(const EmbedderModel& model, const std::string& path);

}  // namespace fmd
