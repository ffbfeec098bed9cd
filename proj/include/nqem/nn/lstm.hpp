// Copyright 2026 The nqem Authors
//
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

#pragma once

#include <array>
#include <vector>

#include "nqem/nn/param.hpp"

namespace nqem {

/// Standard LSTM cell on column batches:
///   i = sig(Wi x + Ui h + bi)    f = sig(Wf x + Uf h + bf)
///   o = sig(Wo x + Uo h + bo)    g = tanh(Wg x + Ug h + bg)
///   c = f . c_prev + i . g       h = o . tanh(c)
/// step() pushes a cache frame; backward_step() pops it, so a K-step
/// unrolled sequence is reversed by K backward_step calls.
class LstmCell {
 public:
  LstmCell(const std::string& name, int input_dim, int hidden_dim)
      : Wi(name + ".Wi", hidden_dim, input_dim),
        Ui(name + ".Ui", hidden_dim, hidden_dim),
        bi(name + ".bi", hidden_dim, 1),
        Wf(name + ".Wf", hidden_dim, input_dim),
        Uf(name + ".Uf", hidden_dim, hidden_dim),
        bf(name + ".bf", hidden_dim, 1),
        Wo(name + ".Wo", hidden_dim, input_dim),
        Uo(name + ".Uo", hidden_dim, hidden_dim),
        bo(name + ".bo", hidden_dim, 1),
        Wg(name + ".Wg", hidden_dim, input_dim),
        Ug(name + ".Ug", hidden_dim, hidden_dim),
        bg(name + ".bg", hidden_dim, 1),
        input_dim_(input_dim),
        hidden_dim_(hidden_dim) {}

  void init(Rng& rng) {
    const int fan = input_dim_ + hidden_dim_;
    for (ParamArray* p : {&Wi, &Ui, &bi, &Wf, &Uf, &bf, &Wo, &Uo, &bo, &Wg,
                          &Ug, &bg}) {
      init_uniform(*p, fan, rng);
    }
  }

  void step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& h_prev,
            const Eigen::MatrixXd& c_prev, Eigen::MatrixXd& h_out,
            Eigen::MatrixXd& c_out) {
    require(x.rows() == input_dim_ && h_prev.rows() == hidden_dim_ &&
                c_prev.rows() == hidden_dim_,
            "lstm step: dimension mismatch");
    require(x.cols() == h_prev.cols() && x.cols() == c_prev.cols(),
            "lstm step: batch mismatch");
    Frame f;
    f.x = x;
    f.h_prev = h_prev;
    f.c_prev = c_prev;
    f.i = gate_sigmoid(Wi, Ui, bi, x, h_prev);
    f.f = gate_sigmoid(Wf, Uf, bf, x, h_prev);
    f.o = gate_sigmoid(Wo, Uo, bo, x, h_prev);
    f.g = gate_tanh(Wg, Ug, bg, x, h_prev);
    c_out = (f.f.array() * c_prev.array() + f.i.array() * f.g.array());
    f.tanh_c = c_out.array().tanh();
    h_out = f.o.array() * f.tanh_c.array();
    frames_.push_back(std::move(f));
  }

  /// Consumes dh/dc for the most recent step; accumulates parameter
  /// gradients and emits gradients for the step inputs.
  void backward_step(const Eigen::MatrixXd& dh, const Eigen::MatrixXd& dc_in,
                     Eigen::MatrixXd& dx, Eigen::MatrixXd& dh_prev,
                     Eigen::MatrixXd& dc_prev) {
    require(!frames_.empty(), "lstm backward: no cached step");
    const Frame f = std::move(frames_.back());
    frames_.pop_back();

    const Eigen::ArrayXXd do_ = dh.array() * f.tanh_c.array();
    const Eigen::ArrayXXd dc =
        dc_in.array() + dh.array() * f.o.array() * (1.0 - f.tanh_c.array().square());
    const Eigen::ArrayXXd di = dc * f.g.array();
    const Eigen::ArrayXXd df = dc * f.c_prev.array();
    const Eigen::ArrayXXd dg = dc * f.i.array();
    dc_prev = (dc * f.f.array()).matrix();

    const Eigen::MatrixXd dai = (di * f.i.array() * (1.0 - f.i.array())).matrix();
    const Eigen::MatrixXd daf = (df * f.f.array() * (1.0 - f.f.array())).matrix();
    const Eigen::MatrixXd dao = (do_ * f.o.array() * (1.0 - f.o.array())).matrix();
    const Eigen::MatrixXd dag = (dg * (1.0 - f.g.array().square())).matrix();

    accumulate(Wi, Ui, bi, dai, f);
    accumulate(Wf, Uf, bf, daf, f);
    accumulate(Wo, Uo, bo, dao, f);
    accumulate(Wg, Ug, bg, dag, f);

    dx = Wi.value.transpose() * dai + Wf.value.transpose() * daf +
         Wo.value.transpose() * dao + Wg.value.transpose() * dag;
    dh_prev = Ui.value.transpose() * dai + Uf.value.transpose() * daf +
              Uo.value.transpose() * dao + Ug.value.transpose() * dag;
  }

  void clear_cache() { frames_.clear(); }

  void collect_params(ParamRefs& out) {
    for (ParamArray* p : {&Wi, &Ui, &bi, &Wf, &Uf, &bf, &Wo, &Uo, &bo, &Wg,
                          &Ug, &bg}) {
      out.push_back(p);
    }
  }

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }

  ParamArray Wi, Ui, bi;
  ParamArray Wf, Uf, bf;
  ParamArray Wo, Uo, bo;
  ParamArray Wg, Ug, bg;

 private:
  struct Frame {
    Eigen::MatrixXd x, h_prev, c_prev;
    Eigen::MatrixXd i, f, o, g, tanh_c;
  };

  static Eigen::MatrixXd preact(const ParamArray& W, const ParamArray& U,
                                const ParamArray& b, const Eigen::MatrixXd& x,
                                const Eigen::MatrixXd& h) {
    Eigen::MatrixXd a = W.value * x + U.value * h;
    a.colwise() += Eigen::VectorXd(b.value.col(0));
    return a;
  }

  static Eigen::MatrixXd gate_sigmoid(const ParamArray& W,
                                      const ParamArray& U,
                                      const ParamArray& b,
                                      const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& h) {
    return preact(W, U, b, x, h).unaryExpr(
        [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  }

  static Eigen::MatrixXd gate_tanh(const ParamArray& W, const ParamArray& U,
                                   const ParamArray& b,
                                   const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& h) {
    return preact(W, U, b, x, h).array().tanh();
  }

  void accumulate(ParamArray& W, ParamArray& U, ParamArray& b,
                  const Eigen::MatrixXd& da, const Frame& f) {
    W.grad += da * f.x.transpose();
    U.grad += da * f.h_prev.transpose();
    b.grad.col(0) += da.rowwise().sum();
  }

  int input_dim_;
  int hidden_dim_;
  std::vector<Frame> frames_;
};

}  // namespace nqem
