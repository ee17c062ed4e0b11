#pragma once

#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revcast/dlm/component.hpp"
#include "revcast/dlm/covariates.hpp"
#include "revcast/error.hpp"

namespace revcast::dlm {

/// Superposition of component blocks: block-diagonal G, concatenated F.
struct ModelStructure {
    std::vector<ComponentBlock> blocks;
    int total_dimension = 0;
    double variance_discount = 1.0;

    Eigen::MatrixXd g;              // full block-diagonal evolution matrix
    std::vector<int> block_offset;  // first state index of each block

    /// State index of a named regression coefficient, or -1.
    int index_of(const std::string& covariate) const {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const auto& tpl = blocks[b].f_template;
            for (std::size_t i = 0; i < tpl.size(); ++i)
                if (tpl[i].covariate == covariate) return block_offset[b] + static_cast<int>(i);
        }
        return -1;
    }

    int trend_index() const {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b].kind == ComponentKind::trend) return block_offset[b];
        return -1;
    }

    std::vector<std::string> covariate_names() const {
        std::vector<std::string> out;
        for (const auto& b : blocks)
            for (auto& n : b.covariate_names()) out.push_back(n);
        return out;
    }

    /// Resolves the observation vector for one week from name → value lookup.
    template <class Lookup>
    Eigen::VectorXd resolve_f(Lookup&& lookup) const {
        Eigen::VectorXd f(total_dimension);
        int k = 0;
        for (const auto& b : blocks)
            for (const auto& e : b.f_template) f(k++) = e.is_covariate() ? lookup(e.covariate) : e.constant;
        return f;
    }

    /// Resolves every row of a covariate table into a (rows x dimension) design.
    Eigen::MatrixXd design(const CovariateTable& table) const {
        const auto rows = static_cast<Eigen::Index>(table.rows());
        Eigen::MatrixXd out(rows, total_dimension);
        int k = 0;
        for (const auto& b : blocks) {
            for (const auto& e : b.f_template) {
                if (e.is_covariate()) {
                    const auto& col = table.column(e.covariate);
                    for (Eigen::Index r = 0; r < rows; ++r) out(r, k) = col[static_cast<std::size_t>(r)];
                } else {
                    out.col(k).setConstant(e.constant);
                }
                ++k;
            }
        }
        return out;
    }
};

inline ModelStructure superpose(std::vector<ComponentBlock> blocks, double variance_discount) {
    if (blocks.empty()) throw ParameterError("model structure needs at least one block");
    if (!(variance_discount > 0.0 && variance_discount <= 1.0))
        throw ParameterError("variance discount must lie in (0, 1], got " + std::to_string(variance_discount));

    std::set<std::string> seen;
    for (const auto& b : blocks)
        for (const auto& n : b.covariate_names())
            if (!seen.insert(n).second) throw NamingCollisionError("covariate '" + n + "' appears in more than one block");

    ModelStructure s;
    s.variance_discount = variance_discount;
    for (const auto& b : blocks) {
        s.block_offset.push_back(s.total_dimension);
        s.total_dimension += b.dimension;
    }
    s.g = Eigen::MatrixXd::Zero(s.total_dimension, s.total_dimension);
    for (std::size_t i = 0; i < blocks.size(); ++i)
        s.g.block(s.block_offset[i], s.block_offset[i], blocks[i].dimension, blocks[i].dimension) = blocks[i].g_block;
    s.blocks = std::move(blocks);
    return s;
}

}  // namespace revcast::dlm
