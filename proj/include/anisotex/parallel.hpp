#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace anisotex {

// ANISOTEX_THREADS caps the worker count; default is the hardware concurrency.
int worker_count();

// Runs f(i) for i in [0, count) on up to worker_count() threads. The first
// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace anisotex
