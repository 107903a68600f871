#ifndef DOCOSIM_ALGORITHMS_HPP
#define DOCOSIM_ALGORITHMS_HPP

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>

#include "docosim/conditional_gradient.hpp"
#include "docosim/decision_set.hpp"
#include "docosim/gossip.hpp"
#include "docosim/gossip_matrix.hpp"

namespace docosim
{

// What happened during one call to OnlineAlgorithm::advance.
struct RoundInfo
{
  // A neighbour exchange took place this round.
  bool gossiped = false;
  // A block ended and duals() now holds the finalized dual variables.
  bool block_closed = false;
};

//
// A decentralized online learner advanced one round at a time. The caller
// reads decisions(), evaluates each learner's local gradient at its own
// decision, and passes the stacked gradients to advance().
//
class OnlineAlgorithm
{
public:
  virtual ~OnlineAlgorithm() = default;

  virtual std::string name() const = 0;

  // n x d decisions played in the current round.
  virtual const StackedState &decisions() const = 0;

  virtual RoundInfo advance(const StackedState &gradients) = 0;

  // Cumulative number of rounds in which a gossip exchange occurred.
  virtual int gossip_rounds() const = 0;

  // Modulus used to form generalized gradients g - alpha x.
  virtual double alpha() const = 0;

  // Rounds per block over which decisions are held fixed.
  virtual int block_length() const { return 1; }

  // Latest finalized dual variables z_i (nullptr for centralized learners),
  // and how many blocks of generalized gradients they aggregate.
  virtual const StackedState *duals() const { return nullptr; }
  virtual int dual_blocks() const { return 0; }
};

namespace detail
{
// Row-wise argmin <z_i,x> + (beta/2)||x||^2. A zero accumulator with
// beta = 0 makes every point optimal; the origin is returned.
inline StackedState ftgl_decisions(const DecisionSet &K, const StackedState &Z, double beta)
{
  StackedState X(Z.rows(), Z.cols());
  for (Eigen::Index i = 0; i < Z.rows(); i++)
  {
    const Vector z = Z.row(i).transpose();
    if (beta == 0.0 && z.isZero(0.0))
    {
      X.row(i).setZero();
    }
    else
    {
      X.row(i) = K.reg_argmin(z, beta).transpose();
    }
  }
  return X;
}

inline void check_gradients(const StackedState &X, const StackedState &G)
{
  if (G.rows() != X.rows() || G.cols() != X.cols())
  {
    throw std::invalid_argument("gradient block is " + std::to_string(G.rows()) + "x" +
                                std::to_string(G.cols()) + ", expected " +
                                std::to_string(X.rows()) + "x" + std::to_string(X.cols()));
  }
}
}  // namespace detail

struct AdftglParams
{
  double alpha = 0.0;
  double h = 1.0;
  double theta = 0.5;
  // Block length; also the number of accelerated gossip steps per block.
  int L = 1;
};

//
// Accelerated decentralized follow-the-generalized-leader. Decisions are
// held fixed for blocks of L rounds; from block 2 on, each round performs one
// accelerated gossip step on the dual buffers, so L exchanges per block
// average the previous block's generalized gradients. At the end of block z,
//   z_i(z) = z_i^L(z),
//   x_i(z+1) = argmin_K <z_i(z), x> + ((z-1) L alpha / 2 + h) ||x||^2.
// The next block starts from z_i^0 = z_i(z) + d_i(z) and
// z_i^{-1} = z_i^{L-1}(z) + d_i(z).
//
class Adftgl : public OnlineAlgorithm
{
public:
  Adftgl(GossipMatrix P, DecisionSet K, AdftglParams params)
    : P_(std::move(P)), K_(K), p_(params)
  {
    if (p_.L < 1)
    {
      throw std::invalid_argument("adftgl: block length must be >= 1");
    }
    if (p_.alpha < 0.0 || p_.h < 0.0)
    {
      throw std::invalid_argument("adftgl: alpha and h must be nonnegative");
    }
    const int n = P_.size(), d = K_.dimension();
    X_ = Z_ = Zk_ = Zprev_ = Zpenult_ = D_ = StackedState::Zero(n, d);
  }

  std::string name() const override { return "adftgl"; }
  const StackedState &decisions() const override { return X_; }
  int gossip_rounds() const override { return gossip_; }
  double alpha() const override { return p_.alpha; }
  int block_length() const override { return p_.L; }
  const StackedState *duals() const override { return &Z_; }
  int dual_blocks() const override { return std::max(0, block_ - 2); }
  int block() const { return block_; }
  const AdftglParams &params() const { return p_; }

  RoundInfo advance(const StackedState &G) override
  {
    detail::check_gradients(X_, G);
    RoundInfo info;
    D_ += G - p_.alpha * X_;
    if (block_ >= 2)
    {
      StackedState next = accelerated_step(P_, Zk_, Zprev_, p_.theta);
      Zprev_ = std::move(Zk_);
      Zk_ = std::move(next);
      k_++;
      if (k_ == p_.L - 1)
      {
        Zpenult_ = Zk_;
      }
      gossip_++;
      info.gossiped = true;
    }
    if (++t_in_block_ == p_.L)
    {
      if (block_ >= 2)
      {
        Z_ = Zk_;
      }
      const double beta = (block_ - 1) * p_.L * p_.alpha + 2.0 * p_.h;
      X_ = detail::ftgl_decisions(K_, Z_, beta);

      Zprev_ = Zpenult_ + D_;
      Zk_ = Z_ + D_;
      if (p_.L == 1)
      {
        Zpenult_ = Zk_;
      }
      D_.setZero();
      k_ = 0;
      t_in_block_ = 0;
      block_++;
      info.block_closed = true;
    }
    return info;
  }

private:
  GossipMatrix P_;
  DecisionSet K_;
  AdftglParams p_;
  StackedState X_, Z_, Zk_, Zprev_, Zpenult_, D_;
  int block_ = 1;
  int k_ = 0;
  int t_in_block_ = 0;
  int gossip_ = 0;
};

struct PfAdftglParams
{
  double alpha = 0.0;
  double h = 1.0;
  double theta = 0.5;
  // Block length, which is also the CG iteration budget per block.
  int L = 1;
  // Accelerated gossip steps per block (L' <= L).
  int L_gossip = 1;
  // Replace the L-step CG solve with the exact regularized argmin.
  bool exact_inner = false;
};

//
// Projection-free AD-FTGL. Block z >= 2 runs one CG iteration per round on
//   F_{z,i}(x) = <z_i(z-1), x> + ((z-2) L alpha / 2 + h) ||x||^2
// warm-started at x_i(z); the result after L iterations is x_i(z+1). Only the
// first L' rounds of each block carry a gossip exchange.
//
class PfAdftgl : public OnlineAlgorithm
{
public:
  PfAdftgl(GossipMatrix P, DecisionSet K, PfAdftglParams params)
    : P_(std::move(P)), K_(K), p_(params)
  {
    if (p_.L < 1 || p_.L_gossip < 1)
    {
      throw std::invalid_argument("pf_adftgl: L and L' must be >= 1");
    }
    if (p_.L_gossip > p_.L)
    {
      throw std::invalid_argument("pf_adftgl: L' = " + std::to_string(p_.L_gossip) +
                                  " exceeds block length L = " + std::to_string(p_.L));
    }
    if (!(p_.h > 0.0) || p_.alpha < 0.0)
    {
      throw std::invalid_argument("pf_adftgl: need h > 0 and alpha >= 0");
    }
    const int n = P_.size(), d = K_.dimension();
    X_ = Y_ = Z_ = Ztarget_ = Zk_ = Zprev_ = Zpenult_ = D_ = StackedState::Zero(n, d);
  }

  std::string name() const override { return "pf_adftgl"; }
  const StackedState &decisions() const override { return X_; }
  int gossip_rounds() const override { return gossip_; }
  double alpha() const override { return p_.alpha; }
  int block_length() const override { return p_.L; }
  const StackedState *duals() const override { return &Z_; }
  int dual_blocks() const override { return std::max(0, block_ - 2); }
  const PfAdftglParams &params() const { return p_; }

  RoundInfo advance(const StackedState &G) override
  {
    detail::check_gradients(X_, G);
    RoundInfo info;
    D_ += G - p_.alpha * X_;
    if (block_ >= 2)
    {
      if (k_ < p_.L_gossip)
      {
        StackedState next = accelerated_step(P_, Zk_, Zprev_, p_.theta);
        Zprev_ = std::move(Zk_);
        Zk_ = std::move(next);
        k_++;
        if (k_ == p_.L_gossip - 1)
        {
          Zpenult_ = Zk_;
        }
        gossip_++;
        info.gossiped = true;
      }
      if (!p_.exact_inner)
      {
        for (Eigen::Index i = 0; i < Y_.rows(); i++)
        {
          Y_.row(i) =
            cg_step(K_, Ztarget_.row(i).transpose(), cg_beta(), Y_.row(i).transpose()).transpose();
        }
      }
    }
    if (++t_in_block_ == p_.L)
    {
      StackedState next_x = StackedState::Zero(X_.rows(), X_.cols());
      if (block_ >= 2)
      {
        Z_ = Zk_;
        next_x = p_.exact_inner ? detail::ftgl_decisions(K_, Ztarget_, cg_beta()) : Y_;
      }
      X_ = std::move(next_x);

      // Block z+1 targets F_{z+1,i}, built from z_i(z).
      Ztarget_ = Z_;
      Y_ = X_;
      Zprev_ = Zpenult_ + D_;
      Zk_ = Z_ + D_;
      if (p_.L_gossip == 1)
      {
        Zpenult_ = Zk_;
      }
      D_.setZero();
      k_ = 0;
      t_in_block_ = 0;
      block_++;
      info.block_closed = true;
    }
    return info;
  }

private:
  // Curvature of F_{z,i}: (z-2) L alpha + 2h.
  double cg_beta() const { return (block_ - 2) * p_.L * p_.alpha + 2.0 * p_.h; }

  GossipMatrix P_;
  DecisionSet K_;
  PfAdftglParams p_;
  StackedState X_, Y_, Z_, Ztarget_, Zk_, Zprev_, Zpenult_, D_;
  int block_ = 1;
  int k_ = 0;
  int t_in_block_ = 0;
  int gossip_ = 0;
};

struct DftglParams
{
  double alpha = 0.0;
  double h = 1.0;
};

//
// Decentralized follow-the-generalized-leader with one standard gossip step
// per round:
//   z_i(t+1) = sum_j P_ij z_j(t) + (grad f_{t,i}(x_i(t)) - alpha x_i(t))
//   x_i(t+1) = argmin_K <z_i(t+1), x> + (t alpha / 2 + h) ||x||^2
// Every z_j(1) is zero, so round 1 needs no exchange.
//
class Dftgl : public OnlineAlgorithm
{
public:
  Dftgl(GossipMatrix P, DecisionSet K, DftglParams params) : P_(std::move(P)), K_(K), p_(params)
  {
    if (p_.alpha < 0.0 || p_.h < 0.0)
    {
      throw std::invalid_argument("dftgl: alpha and h must be nonnegative");
    }
    X_ = Z_ = StackedState::Zero(P_.size(), K_.dimension());
  }

  std::string name() const override { return "dftgl"; }
  const StackedState &decisions() const override { return X_; }
  int gossip_rounds() const override { return gossip_; }
  double alpha() const override { return p_.alpha; }
  const StackedState *duals() const override { return &Z_; }
  int dual_blocks() const override { return t_ - 1; }

  RoundInfo advance(const StackedState &G) override
  {
    detail::check_gradients(X_, G);
    RoundInfo info;
    const StackedState D = G - p_.alpha * X_;
    if (t_ >= 2)
    {
      Z_ = standard_step(P_, Z_) + D;
      gossip_++;
      info.gossiped = true;
    }
    else
    {
      Z_ = D;
    }
    X_ = detail::ftgl_decisions(K_, Z_, t_ * p_.alpha + 2.0 * p_.h);
    t_++;
    info.block_closed = true;
    return info;
  }

private:
  GossipMatrix P_;
  DecisionSet K_;
  DftglParams p_;
  StackedState X_, Z_;
  int t_ = 1;
  int gossip_ = 0;
};

//
// Centralized baselines with full access to the global gradient
// sum_j grad f_{t,j}(x(t)). All learners play the same x.
//   FTRL: x(t+1) = argmin_K <sum_s g(s), x> + h ||x||^2        (h = 1/eta)
//   FTAL: x(t+1) = argmin_K <sum_s (g(s) - alpha x(s)), x> + (t alpha / 2) ||x||^2
// For FTAL, alpha is the modulus of the global loss.
//
class Centralized : public OnlineAlgorithm
{
public:
  enum class Rule
  {
    Ftrl,
    Ftal
  };

  Centralized(Rule rule, int n, DecisionSet K, double alpha, double h)
    : rule_(rule), K_(K), alpha_(alpha), h_(h)
  {
    if (rule_ == Rule::Ftal && !(alpha_ > 0.0))
    {
      throw std::invalid_argument("ftal: alpha must be positive");
    }
    if (rule_ == Rule::Ftrl && !(h_ > 0.0))
    {
      throw std::invalid_argument("ftrl: h = 1/eta must be positive");
    }
    X_ = StackedState::Zero(n, K_.dimension());
    sum_ = Vector::Zero(K_.dimension());
  }

  static Centralized ftrl(int n, const DecisionSet &K, double h)
  {
    return {Rule::Ftrl, n, K, 0.0, h};
  }
  static Centralized ftal(int n, const DecisionSet &K, double alpha)
  {
    return {Rule::Ftal, n, K, alpha, 0.0};
  }

  std::string name() const override { return rule_ == Rule::Ftrl ? "ftrl" : "ftal"; }
  const StackedState &decisions() const override { return X_; }
  int gossip_rounds() const override { return 0; }
  double alpha() const override { return rule_ == Rule::Ftal ? alpha_ : 0.0; }

  RoundInfo advance(const StackedState &G) override
  {
    detail::check_gradients(X_, G);
    const Vector x = X_.row(0).transpose();
    const Vector g = G.colwise().sum().transpose();
    Vector next;
    if (rule_ == Rule::Ftrl)
    {
      sum_ += g;
      next = K_.reg_argmin(sum_, 2.0 * h_);
    }
    else
    {
      sum_ += g - alpha_ * x;
      next = K_.reg_argmin(sum_, t_ * alpha_);
    }
    X_.rowwise() = next.transpose();
    t_++;
    return {};
  }

private:
  Rule rule_;
  DecisionSet K_;
  double alpha_;
  double h_;
  StackedState X_;
  Vector sum_;
  int t_ = 1;
};

}  // namespace docosim

#endif  // DOCOSIM_ALGORITHMS_HPP
