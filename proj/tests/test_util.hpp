// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOIST_TEST_UTIL_HPP
#define HOIST_TEST_UTIL_HPP

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hoist/config_space.hpp"
#include "hoist/forest.hpp"

namespace hoist::test {

inline Configuration make_config(std::map<std::string, ParamValue> values) {
    return Configuration(std::move(values));
}

inline ConfigSpace unit_interval_space(int dims) {
    std::vector<ParameterSpec> params;
    for (int i = 0; i < dims; ++i)
        params.push_back({"x" + std::to_string(i + 1), ParamKind::Continuous, 0.0, 1.0, {}});
    return ConfigSpace(std::move(params));
}

// A lookup-table tree over feature 0: maps each anchor x (ascending, distinct)
// to its value. Inputs between anchors fall to the nearest-left leaf.
// Layout: stump i at slot 2i, leaf i at slot 2i+1, final leaf at 2(n-1).
inline RegressionTree table_tree(const std::vector<double>& xs, const std::vector<double>& vs) {
    const int n = static_cast<int>(xs.size());
    RegressionTree tree;
    if (n == 1) {
        tree.nodes.push_back({-1, 0.0, -1, -1, vs[0]});
        return tree;
    }
    tree.nodes.resize(static_cast<std::size_t>(2 * n - 1));
    for (int i = 0; i + 1 < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(2 * i);
        const double threshold =
            xs[static_cast<std::size_t>(i)] +
            (xs[static_cast<std::size_t>(i + 1)] - xs[static_cast<std::size_t>(i)]) / 2.0;
        tree.nodes[si] = {0, threshold, 2 * i + 1, i + 2 < n ? 2 * (i + 1) : 2 * (n - 1), 0.0};
        tree.nodes[si + 1] = {-1, 0.0, -1, -1, vs[static_cast<std::size_t>(i)]};
    }
    tree.nodes[static_cast<std::size_t>(2 * (n - 1))] = {-1, 0.0, -1, -1,
                                                         vs[static_cast<std::size_t>(n - 1)]};
    return tree;
}

// Stub member with a fixed prediction table on feature 0 and zero variance.
inline ForestModel stub_member(int feature_dim, const std::vector<double>& xs,
                               const std::vector<double>& vs) {
    ForestModel model;
    model.feature_dim = feature_dim;
    model.variance_floor = 0.0;
    model.trees.push_back(table_tree(xs, vs));
    return model;
}

// Stub member realizing an exact (mean, sigma^2) posterior everywhere via two
// constant trees at mean +/- sigma.
inline ForestModel stub_posterior_member(int feature_dim, double mean, double sigma) {
    ForestModel model;
    model.feature_dim = feature_dim;
    model.variance_floor = 0.0;
    RegressionTree hi, lo;
    hi.nodes.push_back({-1, 0.0, -1, -1, mean + sigma});
    lo.nodes.push_back({-1, 0.0, -1, -1, mean - sigma});
    model.trees.push_back(hi);
    model.trees.push_back(lo);
    return model;
}

// Numeric oracle for expected improvement: composite Simpson over the
// improvement region of the Gaussian posterior.
inline double ei_quadrature(double mean, double variance, double y_star) {
    const double sigma = std::sqrt(variance);
    if (sigma == 0.0) return std::max(y_star - mean, 0.0);
    const double lower = std::min(mean - 16.0 * sigma, y_star - 16.0 * sigma);
    const double upper = y_star;
    if (upper <= lower) return 0.0;
    const int intervals = 200000;  // even
    const double h = (upper - lower) / intervals;
    auto integrand = [&](double y) {
        const double z = (y - mean) / sigma;
        const double pdf = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::acos(-1.0)));
        return (y_star - y) * pdf;
    };
    double sum = integrand(lower) + integrand(upper);
    for (int i = 1; i < intervals; ++i) {
        const double y = lower + h * i;
        sum += integrand(y) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

// Runs a shell command, capturing combined output.
inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return result;
    std::array<char, 512> buffer{};
    while (std::fgets(buffer.data(), static_cast<int>(buffer.size()), pipe))
        result.output += buffer.data();
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

// Fresh scratch directory removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("hoist_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace hoist::test

#endif  // HOIST_TEST_UTIL_HPP
