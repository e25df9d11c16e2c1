#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

namespace logsob {

/// Arithmetic over the ambient coordinates x1..xN with + - * / ( ), the
/// functions exp, log, sin, cos, numeric literals and pi. Enough to express
/// every fixture density without a scripting dependency.
class Expression {
  public:
    static Expression parse(const std::string& text);

    double evaluate(const Eigen::VectorXd& coords) const;

    /// Evaluates at every mesh vertex.
    Eigen::VectorXd evaluate_field(const Eigen::MatrixXd& vertices) const;

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
};

} // namespace logsob
