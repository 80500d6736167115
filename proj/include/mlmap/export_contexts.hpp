#pragma once

#include <array>
#include <string>
#include <vector>

namespace mlmap {

struct ContextRow {
    std::string id;
    std::string label;
    std::vector<double> values;
};

// First two principal components of the (column-centered) row vectors.
// Component signs are fixed so repeated runs agree.
std::vector<std::array<double, 2>> pca_2d(const std::vector<ContextRow>& rows);

// id,label,c0..c{D-1}[,pca0,pca1]
void write_context_csv(const std::vector<ContextRow>& rows, bool with_pca, const std::string& path);

}  // namespace mlmap
