#include <cstring>
#include <new>
#include <string>

#include "app/config.hpp"
#include "app/run.hpp"
#include "core/error.hpp"
#include "rivet/rivet.h"

struct rivet_config {
  rivet::app::KeyValues kv;
};

namespace {

thread_local std::string g_last_error;

rivet_status status_of(rivet::ErrorKind kind) {
  using rivet::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument: return RIVET_ERR_INVALID_ARGUMENT;
    case ErrorKind::Config: return RIVET_ERR_CONFIG;
    case ErrorKind::Mesh: return RIVET_ERR_MESH;
    case ErrorKind::NonConvergence: return RIVET_ERR_NONCONVERGENCE;
    case ErrorKind::ConstraintViolation: return RIVET_ERR_CONSTRAINT;
    case ErrorKind::Solver: return RIVET_ERR_SOLVER;
    case ErrorKind::Io: return RIVET_ERR_IO;
  }
  return RIVET_ERR_INTERNAL;
}

rivet_status fail(rivet_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
rivet_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return RIVET_OK;
  } catch (const rivet::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RIVET_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RIVET_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* rivet_version(void) { return "1.0.0"; }

const char* rivet_last_error(void) { return g_last_error.c_str(); }

int rivet_exit_code(rivet_status status) {
  switch (status) {
    case RIVET_OK: return 0;
    case RIVET_ERR_INVALID_ARGUMENT: return rivet::app::exit_code(rivet::ErrorKind::InvalidArgument);
    case RIVET_ERR_CONFIG: return rivet::app::exit_code(rivet::ErrorKind::Config);
    case RIVET_ERR_MESH: return rivet::app::exit_code(rivet::ErrorKind::Mesh);
    case RIVET_ERR_NONCONVERGENCE: return rivet::app::exit_code(rivet::ErrorKind::NonConvergence);
    case RIVET_ERR_CONSTRAINT: return rivet::app::exit_code(rivet::ErrorKind::ConstraintViolation);
    case RIVET_ERR_SOLVER: return rivet::app::exit_code(rivet::ErrorKind::Solver);
    case RIVET_ERR_IO: return rivet::app::exit_code(rivet::ErrorKind::Io);
    case RIVET_ERR_INTERNAL: return 3;
  }
  return 3;
}

rivet_status rivet_config_new(rivet_config** out) {
  if (!out) return fail(RIVET_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new rivet_config(); });
}

rivet_status rivet_config_load(const char* path, rivet_config** out) {
  if (!out || !path) return fail(RIVET_ERR_INVALID_ARGUMENT, "path or out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto* c = new rivet_config();
    try {
      c->kv = rivet::app::read_ini(path);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

rivet_status rivet_config_from_preset(const char* name, rivet_config** out) {
  if (!out || !name) return fail(RIVET_ERR_INVALID_ARGUMENT, "name or out is NULL");
  *out = nullptr;
  return guarded([&] {
    rivet::app::preset_keys(name);
    auto* c = new rivet_config();
    c->kv["run.preset"] = name;
    *out = c;
  });
}

void rivet_config_free(rivet_config* config) { delete config; }

rivet_status rivet_config_set(rivet_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(RIVET_ERR_INVALID_ARGUMENT, "NULL argument");
  const std::string k = key;
  const auto dot = k.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == k.size()) {
    return fail(RIVET_ERR_INVALID_ARGUMENT, "key must have the form section.key: " + k);
  }
  return guarded([&] { config->kv[k] = value; });
}

rivet_status rivet_config_get(const rivet_config* config, const char* key, char* buf, size_t len) {
  if (!config || !key || !buf || len == 0) return fail(RIVET_ERR_INVALID_ARGUMENT, "NULL argument");
  const auto it = config->kv.find(key);
  if (it == config->kv.end()) {
    buf[0] = '\0';
    return fail(RIVET_ERR_INVALID_ARGUMENT, std::string("no such key: ") + key);
  }
  if (it->second.size() + 1 > len) {
    buf[0] = '\0';
    return fail(RIVET_ERR_INVALID_ARGUMENT, "buffer too small");
  }
  std::memcpy(buf, it->second.c_str(), it->second.size() + 1);
  g_last_error.clear();
  return RIVET_OK;
}

rivet_status rivet_config_validate(const rivet_config* config) {
  if (!config) return fail(RIVET_ERR_INVALID_ARGUMENT, "config is NULL");
  return guarded([&] { rivet::app::parse_config(config->kv); });
}

rivet_status rivet_run(const rivet_config* config, int* steps_out) {
  if (!config) return fail(RIVET_ERR_INVALID_ARGUMENT, "config is NULL");
  return guarded([&] {
    const auto summary = rivet::app::run(rivet::app::parse_config(config->kv));
    if (steps_out) *steps_out = summary.steps;
  });
}

}  // extern "C"
