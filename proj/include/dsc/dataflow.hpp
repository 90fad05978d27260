#pragma once

#include <any>
#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "dsc/hashing.hpp"

namespace dsc::flow {

// Thrown on every worker when the collective call sequence diverges
// (different operations, or a worker leaving while others wait).
struct LockstepViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Op : std::uint64_t {
  barrier = 1,
  alloc,
  freeze,
  once,
  sort,
  aggregate,
  aggregate_index,
  reduce_index,
  all_reduce,
};

class WorkerPool;

struct Worker {
  WorkerPool& pool;
  int id;

  int count() const;
  std::uint64_t seed() const;

  void barrier(Op op);
  // All workers deposit a value; the last arriver runs `complete` on the
  // deposits (indexed by worker) and the result is broadcast to everyone.
  std::any collective(Op op, std::any value,
                      const std::function<std::any(std::vector<std::any>&)>& complete);

  // Runs `make` exactly once (by the last arriver); all workers receive the
  // same shared pointer.
  template <class T, class F>
  std::shared_ptr<const T> once(F make) {
    std::any r = collective(Op::once, {}, [&make](std::vector<std::any>&) -> std::any {
      return std::shared_ptr<const T>(std::make_shared<T>(make()));
    });
    return std::any_cast<std::shared_ptr<const T>>(r);
  }
};

// In-process stand-in for a distributed execution: P worker threads run the
// same program in lockstep; collectives exchange data through shared memory.
class WorkerPool {
 public:
  explicit WorkerPool(int workers, std::uint64_t seed = 0);

  int workers() const { return num_workers_; }
  std::uint64_t seed() const { return seed_; }

  template <class F>
  void run(F&& body) {
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::vector<std::thread> threads;
    threads.reserve(num_workers_);
    reset();
    for (int w = 0; w < num_workers_; ++w) {
      threads.emplace_back([this, w, &body, &first_error, &err_mutex] {
        Worker ctx{*this, w};
        try {
          body(ctx);
        } catch (...) {
          std::lock_guard lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
        worker_done();
      });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

 private:
  friend struct Worker;

  void reset();
  void worker_done();
  std::any collective(int wid, std::uint64_t tag, std::any value,
                      const std::function<std::any(std::vector<std::any>&)>& complete);

  int num_workers_;
  std::uint64_t seed_;

  std::mutex mutex_;
  std::condition_variable cv_;
  int arrived_ = 0;
  int done_ = 0;
  std::uint64_t phase_ = 0;
  bool poisoned_ = false;
  std::string poison_reason_;
  std::vector<std::uint64_t> tags_;
  std::vector<std::any> deposits_;
  std::any result_;
};

inline int Worker::count() const { return pool.workers(); }
inline std::uint64_t Worker::seed() const { return pool.seed(); }
inline std::any Worker::collective(Op op, std::any value,
                                   const std::function<std::any(std::vector<std::any>&)>& complete) {
  return pool.collective(id, static_cast<std::uint64_t>(op), std::move(value), complete);
}
inline void Worker::barrier(Op op) { collective(op, {}, nullptr); }

// ---------------------------------------------------------------------------
// DistArray: partitioned immutable sequence. The logical sequence is the
// concatenation of the per-worker partitions. Handles returned by collectives
// on different workers share the same frozen storage.

template <class T>
class DistArray {
 public:
  using Parts = std::vector<std::vector<T>>;

  DistArray() = default;
  explicit DistArray(std::shared_ptr<const Parts> parts) : parts_(std::move(parts)) {}

  const Parts& parts() const { return *parts_; }
  const std::vector<T>& local(int wid) const { return (*parts_)[wid]; }

  std::size_t size() const {
    std::size_t total = 0;
    for (const auto& p : *parts_) total += p.size();
    return total;
  }

  // Logical concatenation; convenience for drivers and tests.
  std::vector<T> gather() const {
    std::vector<T> out;
    out.reserve(size());
    for (const auto& p : *parts_)
      out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  bool valid() const { return parts_ != nullptr; }

 private:
  std::shared_ptr<const Parts> parts_;
};

// Random access over a frozen DistArray.
template <class T>
class Indexer {
 public:
  explicit Indexer(const DistArray<T>& a) : a_(&a) {
    offsets_.reserve(a.parts().size() + 1);
    std::size_t off = 0;
    for (const auto& p : a.parts()) {
      offsets_.push_back(off);
      off += p.size();
    }
    offsets_.push_back(off);
  }

  const T& operator[](std::size_t i) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
    std::size_t part = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return a_->parts()[part][i - offsets_[part]];
  }

  std::size_t size() const { return offsets_.back(); }

 private:
  const DistArray<T>* a_;
  std::vector<std::size_t> offsets_;
};

namespace detail {

// [begin, end) of the canonical block partition of n elements for worker w.
inline std::pair<std::size_t, std::size_t> block_range(std::size_t n, int workers, int w) {
  std::size_t base = n / workers, rem = n % workers;
  std::size_t begin = static_cast<std::size_t>(w) * base + std::min<std::size_t>(w, rem);
  std::size_t len = base + (static_cast<std::size_t>(w) < rem ? 1 : 0);
  return {begin, begin + len};
}

template <class T>
std::shared_ptr<typename DistArray<T>::Parts> alloc_parts(Worker& w) {
  std::any r = w.collective(Op::alloc, {}, [&w](std::vector<std::any>&) -> std::any {
    return std::make_shared<typename DistArray<T>::Parts>(w.count());
  });
  return std::any_cast<std::shared_ptr<typename DistArray<T>::Parts>>(r);
}

template <class T>
DistArray<T> freeze(Worker& w, std::shared_ptr<typename DistArray<T>::Parts> parts) {
  w.barrier(Op::freeze);
  return DistArray<T>(std::shared_ptr<const typename DistArray<T>::Parts>(std::move(parts)));
}

}  // namespace detail

// Materializes f(0), ..., f(n-1) block-partitioned over the workers.
template <class F>
auto generate(Worker& w, std::size_t n, F f) -> DistArray<std::decay_t<decltype(f(std::size_t{}))>> {
  using U = std::decay_t<decltype(f(std::size_t{}))>;
  auto parts = detail::alloc_parts<U>(w);
  auto [begin, end] = detail::block_range(n, w.count(), w.id);
  auto& mine = (*parts)[w.id];
  mine.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) mine.push_back(f(i));
  return detail::freeze<U>(w, std::move(parts));
}

template <class T>
DistArray<T> distribute(Worker& w, const std::vector<T>& full) {
  return generate(w, full.size(), [&full](std::size_t i) { return full[i]; });
}

template <class T, class F>
auto dmap(Worker& w, const DistArray<T>& a, F f) -> DistArray<std::decay_t<decltype(f(std::declval<const T&>()))>> {
  using U = std::decay_t<decltype(f(std::declval<const T&>()))>;
  auto parts = detail::alloc_parts<U>(w);
  const auto& in = a.local(w.id);
  auto& mine = (*parts)[w.id];
  mine.reserve(in.size());
  for (const T& x : in) mine.push_back(f(x));
  return detail::freeze<U>(w, std::move(parts));
}

// dmap with the element's logical (global) index as second argument.
template <class T, class F>
auto dmap_indexed(Worker& w, const DistArray<T>& a, F f)
    -> DistArray<std::decay_t<decltype(f(std::declval<const T&>(), std::size_t{}))>> {
  using U = std::decay_t<decltype(f(std::declval<const T&>(), std::size_t{}))>;
  std::size_t offset = 0;
  for (int p = 0; p < w.id; ++p) offset += a.local(p).size();
  auto parts = detail::alloc_parts<U>(w);
  const auto& in = a.local(w.id);
  auto& mine = (*parts)[w.id];
  mine.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) mine.push_back(f(in[i], offset + i));
  return detail::freeze<U>(w, std::move(parts));
}

template <class T, class F>
auto flat_map(Worker& w, const DistArray<T>& a, F f)
    -> DistArray<typename std::decay_t<decltype(f(std::declval<const T&>()))>::value_type> {
  using U = typename std::decay_t<decltype(f(std::declval<const T&>()))>::value_type;
  auto parts = detail::alloc_parts<U>(w);
  auto& mine = (*parts)[w.id];
  for (const T& x : a.local(w.id)) {
    auto emitted = f(x);
    mine.insert(mine.end(), std::make_move_iterator(emitted.begin()), std::make_move_iterator(emitted.end()));
  }
  return detail::freeze<U>(w, std::move(parts));
}

// Positional pairing; partitioning follows `a`. Length mismatch is a
// contract violation.
template <class T, class U>
DistArray<std::pair<T, U>> zip(Worker& w, const DistArray<T>& a, const DistArray<U>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("zip: length mismatch");
  auto parts = detail::alloc_parts<std::pair<T, U>>(w);
  Indexer<U> bidx(b);
  std::size_t offset = 0;
  for (int p = 0; p < w.id; ++p) offset += a.local(p).size();
  const auto& in = a.local(w.id);
  auto& mine = (*parts)[w.id];
  mine.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) mine.emplace_back(in[i], bidx[offset + i]);
  return detail::freeze<std::pair<T, U>>(w, std::move(parts));
}

// Globally sorted by key, stable within equal keys. Output block-partitioned.
template <class T, class KeyFn>
DistArray<T> sort_by_key(Worker& w, const DistArray<T>& a, KeyFn key) {
  // Local stable sort per partition, then a stable P-way concat-merge by the
  // last arriver; run order breaks ties, which preserves global stability.
  auto local_sorted = std::make_shared<std::vector<T>>(a.local(w.id));
  std::stable_sort(local_sorted->begin(), local_sorted->end(),
                   [&key](const T& x, const T& y) { return key(x) < key(y); });

  std::any merged_any = w.collective(
      Op::sort, std::any(local_sorted), [&w, &key](std::vector<std::any>& deposits) -> std::any {
        using It = typename std::vector<T>::const_iterator;
        struct Run {
          It cur, end;
          int origin;
        };
        std::vector<Run> runs;
        std::size_t total = 0;
        for (int p = 0; p < w.count(); ++p) {
          auto part = std::any_cast<std::shared_ptr<std::vector<T>>>(deposits[p]);
          if (!part->empty()) runs.push_back(Run{part->cbegin(), part->cend(), p});
          total += part->size();
        }
        auto out = std::make_shared<std::vector<T>>();
        out->reserve(total);
        while (!runs.empty()) {
          std::size_t best = 0;
          for (std::size_t r = 1; r < runs.size(); ++r)
            if (key(*runs[r].cur) < key(*runs[best].cur)) best = r;
          out->push_back(*runs[best].cur);
          if (++runs[best].cur == runs[best].end) runs.erase(runs.begin() + best);
        }
        return out;
      });
  auto merged = std::any_cast<std::shared_ptr<std::vector<T>>>(merged_any);

  auto parts = detail::alloc_parts<T>(w);
  auto [begin, end] = detail::block_range(merged->size(), w.count(), w.id);
  (*parts)[w.id].assign(merged->begin() + begin, merged->begin() + end);
  return detail::freeze<T>(w, std::move(parts));
}

// Groups elements by key. Group contents are sorted by the caller-supplied
// secondary key so that results are independent of the worker count. Output
// is one (key, group) element per distinct key, sorted by key.
template <class T, class KeyFn, class SecondaryFn>
auto aggregate_by_key(Worker& w, const DistArray<T>& a, KeyFn key, SecondaryFn secondary)
    -> DistArray<std::pair<std::decay_t<decltype(key(std::declval<const T&>()))>, std::vector<T>>> {
  using K = std::decay_t<decltype(key(std::declval<const T&>()))>;
  using Group = std::pair<K, std::vector<T>>;

  // Exchange: every element goes to worker hash(key) mod P.
  auto buckets = std::make_shared<std::vector<std::vector<T>>>(w.count());
  for (const T& x : a.local(w.id)) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(key(x)));
    (*buckets)[h % w.count()].push_back(x);
  }
  std::any ex_any = w.collective(Op::aggregate, std::any(buckets),
                                 [](std::vector<std::any>& deposits) -> std::any { return deposits; });
  auto exchanged = std::any_cast<std::vector<std::any>>(ex_any);

  // Group what landed here, canonicalize each group's order.
  std::map<K, std::vector<T>> groups;
  for (int src = 0; src < w.count(); ++src) {
    auto src_buckets = std::any_cast<std::shared_ptr<std::vector<std::vector<T>>>>(exchanged[src]);
    for (const T& x : (*src_buckets)[w.id]) groups[key(x)].push_back(x);
  }
  auto local_groups = std::make_shared<std::vector<Group>>();
  local_groups->reserve(groups.size());
  for (auto& [k, members] : groups) {
    std::sort(members.begin(), members.end(),
              [&secondary](const T& x, const T& y) { return secondary(x) < secondary(y); });
    local_groups->emplace_back(k, std::move(members));
  }

  // Key sets are disjoint across workers; merge by key and block-split.
  std::any merged_any = w.collective(
      Op::aggregate, std::any(local_groups), [&w](std::vector<std::any>& deposits) -> std::any {
        auto out = std::make_shared<std::vector<Group>>();
        for (int p = 0; p < w.count(); ++p) {
          auto part = std::any_cast<std::shared_ptr<std::vector<Group>>>(deposits[p]);
          out->insert(out->end(), std::make_move_iterator(part->begin()), std::make_move_iterator(part->end()));
        }
        std::sort(out->begin(), out->end(),
                  [](const Group& x, const Group& y) { return x.first < y.first; });
        return out;
      });
  auto merged = std::any_cast<std::shared_ptr<std::vector<Group>>>(merged_any);

  auto parts = detail::alloc_parts<Group>(w);
  auto [begin, end] = detail::block_range(merged->size(), w.count(), w.id);
  (*parts)[w.id].assign(std::make_move_iterator(merged->begin() + begin),
                        std::make_move_iterator(merged->begin() + end));
  return detail::freeze<Group>(w, std::move(parts));
}

// Dense-integer-key aggregation: output has exactly one (key, group) element
// for every key in [0, num_keys), sorted by key; missing keys yield empty
// groups. Keys >= num_keys are an error.
template <class T, class KeyFn, class SecondaryFn>
DistArray<std::pair<std::uint64_t, std::vector<T>>> aggregate_to_index(
    Worker& w, const DistArray<T>& a, KeyFn key, std::uint64_t num_keys, SecondaryFn secondary) {
  using Group = std::pair<std::uint64_t, std::vector<T>>;

  auto buckets = std::make_shared<std::vector<std::vector<T>>>(w.count());
  for (const T& x : a.local(w.id)) {
    std::uint64_t k = key(x);
    if (k >= num_keys) throw std::out_of_range("aggregate_to_index: key out of range");
    (*buckets)[k % w.count()].push_back(x);
  }
  std::any ex_any = w.collective(Op::aggregate_index, std::any(buckets),
                                 [](std::vector<std::any>& deposits) -> std::any { return deposits; });
  auto exchanged = std::any_cast<std::vector<std::any>>(ex_any);

  // Worker w owns keys congruent to w mod P.
  std::map<std::uint64_t, std::vector<T>> groups;
  for (int src = 0; src < w.count(); ++src) {
    auto src_buckets = std::any_cast<std::shared_ptr<std::vector<std::vector<T>>>>(exchanged[src]);
    for (const T& x : (*src_buckets)[w.id]) groups[key(x)].push_back(x);
  }
  auto local_groups = std::make_shared<std::map<std::uint64_t, std::vector<T>>>(std::move(groups));
  for (auto& [k, members] : *local_groups)
    std::sort(members.begin(), members.end(),
              [&secondary](const T& x, const T& y) { return secondary(x) < secondary(y); });

  std::any merged_any = w.collective(
      Op::aggregate_index, std::any(local_groups), [&w, num_keys](std::vector<std::any>& deposits) -> std::any {
        auto out = std::make_shared<std::vector<Group>>();
        out->reserve(num_keys);
        for (std::uint64_t k = 0; k < num_keys; ++k) out->emplace_back(k, std::vector<T>{});
        for (int p = 0; p < w.count(); ++p) {
          auto part = std::any_cast<std::shared_ptr<std::map<std::uint64_t, std::vector<T>>>>(deposits[p]);
          for (auto& [k, members] : *part) (*out)[k].second = std::move(members);
        }
        return out;
      });
  auto merged = std::any_cast<std::shared_ptr<std::vector<Group>>>(merged_any);

  auto parts = detail::alloc_parts<Group>(w);
  auto [begin, end] = detail::block_range(num_keys, w.count(), w.id);
  (*parts)[w.id].assign(std::make_move_iterator(merged->begin() + begin),
                        std::make_move_iterator(merged->begin() + end));
  return detail::freeze<Group>(w, std::move(parts));
}

// Streaming variant of aggregate_to_index: per-key pairwise reduction
// instead of materialized groups. `fold` absorbs one element into the
// accumulator, `merge` joins two accumulators; both must be associative and
// commutative so that results match the materialized path.
template <class T, class V, class KeyFn, class FoldFn, class MergeFn>
DistArray<std::pair<std::uint64_t, V>> aggregate_to_index_reduce(
    Worker& w, const DistArray<T>& a, KeyFn key, std::uint64_t num_keys, V init, FoldFn fold, MergeFn merge) {
  using Entry = std::pair<std::uint64_t, V>;

  // Local pairwise reduction, then exchange of per-key partials.
  std::vector<std::map<std::uint64_t, V>> partials(w.count());
  for (const T& x : a.local(w.id)) {
    std::uint64_t k = key(x);
    if (k >= num_keys) throw std::out_of_range("aggregate_to_index_reduce: key out of range");
    auto& dest = partials[k % w.count()];
    auto [it, inserted] = dest.try_emplace(k, init);
    it->second = fold(it->second, x);
  }
  auto partials_ptr = std::make_shared<std::vector<std::map<std::uint64_t, V>>>(std::move(partials));
  std::any ex_any = w.collective(Op::reduce_index, std::any(partials_ptr),
                                 [](std::vector<std::any>& deposits) -> std::any { return deposits; });
  auto exchanged = std::any_cast<std::vector<std::any>>(ex_any);

  std::map<std::uint64_t, V> mine_map;
  for (int src = 0; src < w.count(); ++src) {
    auto part = std::any_cast<std::shared_ptr<std::vector<std::map<std::uint64_t, V>>>>(exchanged[src]);
    for (const auto& [k, v] : (*part)[w.id]) {
      auto [it, inserted] = mine_map.try_emplace(k, v);
      if (!inserted) it->second = merge(it->second, v);
    }
  }
  auto local_reduced = std::make_shared<std::map<std::uint64_t, V>>(std::move(mine_map));

  std::any merged_any = w.collective(
      Op::reduce_index, std::any(local_reduced), [&w, num_keys, &init](std::vector<std::any>& deposits) -> std::any {
        auto out = std::make_shared<std::vector<Entry>>();
        out->reserve(num_keys);
        for (std::uint64_t k = 0; k < num_keys; ++k) out->emplace_back(k, init);
        for (int p = 0; p < w.count(); ++p) {
          auto part = std::any_cast<std::shared_ptr<std::map<std::uint64_t, V>>>(deposits[p]);
          for (auto& [k, v] : *part) (*out)[k].second = std::move(v);
        }
        return out;
      });
  auto merged = std::any_cast<std::shared_ptr<std::vector<Entry>>>(merged_any);

  auto parts = detail::alloc_parts<Entry>(w);
  auto [begin, end] = detail::block_range(num_keys, w.count(), w.id);
  (*parts)[w.id].assign(std::make_move_iterator(merged->begin() + begin),
                        std::make_move_iterator(merged->begin() + end));
  return detail::freeze<Entry>(w, std::move(parts));
}

// Global sum in fixed logical element order (by partition, then index), so
// the result is bit-identical for every worker count. Every worker observes
// the same value.
template <class T>
double all_reduce_sum(Worker& w, const DistArray<T>& a) {
  auto local = std::make_shared<std::vector<double>>();
  local->reserve(a.local(w.id).size());
  for (const T& x : a.local(w.id)) local->push_back(static_cast<double>(x));
  std::any r = w.collective(Op::all_reduce, std::any(local), [&w](std::vector<std::any>& deposits) -> std::any {
    double total = 0;
    for (int p = 0; p < w.count(); ++p)
      for (double x : *std::any_cast<std::shared_ptr<std::vector<double>>>(deposits[p])) total += x;
    return total;
  });
  return std::any_cast<double>(r);
}

}  // namespace dsc::flow
