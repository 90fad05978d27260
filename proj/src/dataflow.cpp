#include "dsc/dataflow.hpp"

namespace dsc::flow {

WorkerPool::WorkerPool(int workers, std::uint64_t seed) : num_workers_(workers), seed_(seed) {
  if (workers < 1) throw std::invalid_argument("WorkerPool: need at least one worker");
  tags_.resize(workers);
  deposits_.resize(workers);
}

void WorkerPool::reset() {
  arrived_ = 0;
  done_ = 0;
  phase_ = 0;
  poisoned_ = false;
  poison_reason_.clear();
}

void WorkerPool::worker_done() {
  std::lock_guard lk(mutex_);
  ++done_;
  if (arrived_ > 0 && arrived_ + done_ == num_workers_) {
    // Someone is stuck inside a collective the leavers never entered.
    poisoned_ = true;
    poison_reason_ = "worker left while others wait in a collective";
    ++phase_;
    cv_.notify_all();
  }
}

std::any WorkerPool::collective(int wid, std::uint64_t tag, std::any value,
                                const std::function<std::any(std::vector<std::any>&)>& complete) {
  if (num_workers_ == 1) {
    std::vector<std::any> single{std::move(value)};
    return complete ? complete(single) : std::any{};
  }

  std::unique_lock lk(mutex_);
  if (poisoned_) throw LockstepViolation(poison_reason_);
  tags_[wid] = tag;
  deposits_[wid] = std::move(value);
  if (done_ > 0) {
    // The full complement can never arrive anymore.
    poisoned_ = true;
    poison_reason_ = "collective invoked after another worker already left";
    ++phase_;
    cv_.notify_all();
    throw LockstepViolation(poison_reason_);
  }
  if (++arrived_ == num_workers_) {
    for (int p = 1; p < num_workers_; ++p) {
      if (tags_[p] != tags_[0]) {
        poisoned_ = true;
        poison_reason_ = "workers invoked different collective operations";
      }
    }
    if (!poisoned_) {
      try {
        result_ = complete ? complete(deposits_) : std::any{};
      } catch (...) {
        poisoned_ = true;
        poison_reason_ = "collective completion threw";
        arrived_ = 0;
        ++phase_;
        cv_.notify_all();
        throw;
      }
    }
    arrived_ = 0;
    ++phase_;
    cv_.notify_all();
    if (poisoned_) throw LockstepViolation(poison_reason_);
    return result_;
  }
  std::uint64_t entered = phase_;
  cv_.wait(lk, [&] { return phase_ != entered; });
  if (poisoned_) throw LockstepViolation(poison_reason_);
  return result_;
}

}  // namespace dsc::flow
