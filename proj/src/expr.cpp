#include "logsob/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "logsob/error.hpp"

namespace logsob {

struct Expression::Node {
    enum class Op { Constant, Coordinate, Add, Sub, Mul, Div, Neg, Exp, Log, Sin, Cos };
    Op op;
    double value = 0.0; // Constant
    int index = 0;      // Coordinate (0-based)
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expression();
        skip_space();
        if (pos_ != text_.size())
            throw Error(ErrorCode::ParseError, "unexpected input at position " + std::to_string(pos_));
        return e;
    }

  private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            if (consume('+')) {
                lhs = make(Node::Op::Add, lhs, term());
            } else if (consume('-')) {
                lhs = make(Node::Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (consume('*')) {
                lhs = make(Node::Op::Mul, lhs, unary());
            } else if (consume('/')) {
                lhs = make(Node::Op::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (consume('-')) return make(Node::Op::Neg, unary());
        if (consume('+')) return unary();
        return primary();
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw Error(ErrorCode::ParseError, "unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (consume('(')) {
            NodePtr e = expression();
            if (!consume(')')) throw Error(ErrorCode::ParseError, "missing ')'");
            return e;
        }
        throw Error(ErrorCode::ParseError, std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        std::size_t end = 0;
        double v = 0.0;
        try {
            v = std::stod(text_.substr(pos_), &end);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad numeric literal at position " + std::to_string(pos_));
        }
        pos_ += end;
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Constant;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        const std::string name = text_.substr(pos_, end - pos_);
        pos_ = end;

        if (name == "pi") {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Constant;
            n->value = std::numbers::pi;
            return n;
        }
        if (name.size() >= 2 && name[0] == 'x') {
            const int idx = std::atoi(name.c_str() + 1);
            if (idx >= 1 && idx <= 8) {
                auto n = std::make_shared<Node>();
                n->op = Node::Op::Coordinate;
                n->index = idx - 1;
                return n;
            }
        }
        Node::Op op;
        if (name == "exp") op = Node::Op::Exp;
        else if (name == "log") op = Node::Op::Log;
        else if (name == "sin") op = Node::Op::Sin;
        else if (name == "cos") op = Node::Op::Cos;
        else throw Error(ErrorCode::ParseError, "unknown identifier '" + name + "'");
        if (!consume('(')) throw Error(ErrorCode::ParseError, name + " needs parentheses");
        NodePtr arg = expression();
        if (!consume(')')) throw Error(ErrorCode::ParseError, "missing ')'");
        return make(op, arg);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, const Eigen::VectorXd& coords) {
    switch (n.op) {
        case Node::Op::Constant: return n.value;
        case Node::Op::Coordinate:
            if (n.index >= coords.size())
                throw Error(ErrorCode::ParseError,
                            "coordinate x" + std::to_string(n.index + 1) + " exceeds ambient dimension");
            return coords(n.index);
        case Node::Op::Add: return eval_node(*n.lhs, coords) + eval_node(*n.rhs, coords);
        case Node::Op::Sub: return eval_node(*n.lhs, coords) - eval_node(*n.rhs, coords);
        case Node::Op::Mul: return eval_node(*n.lhs, coords) * eval_node(*n.rhs, coords);
        case Node::Op::Div: return eval_node(*n.lhs, coords) / eval_node(*n.rhs, coords);
        case Node::Op::Neg: return -eval_node(*n.lhs, coords);
        case Node::Op::Exp: return std::exp(eval_node(*n.lhs, coords));
        case Node::Op::Log: return std::log(eval_node(*n.lhs, coords));
        case Node::Op::Sin: return std::sin(eval_node(*n.lhs, coords));
        case Node::Op::Cos: return std::cos(eval_node(*n.lhs, coords));
    }
    throw Error(ErrorCode::ParseError, "corrupt expression tree");
}

} // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).run();
    return e;
}

double Expression::evaluate(const Eigen::VectorXd& coords) const {
    return eval_node(*root_, coords);
}

Eigen::VectorXd Expression::evaluate_field(const Eigen::MatrixXd& vertices) const {
    Eigen::VectorXd out(vertices.rows());
    for (Eigen::Index i = 0; i < vertices.rows(); ++i)
        out(i) = evaluate(vertices.row(i).transpose());
    return out;
}

} // namespace logsob
