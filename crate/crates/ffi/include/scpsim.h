#ifndef SCPSIM_H
#define SCPSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum ScpStatus {
  SCP_STATUS_OK = 0,
  SCP_STATUS_NULL_POINTER = 1,
  SCP_STATUS_INVALID_ARGUMENT = 2,
  SCP_STATUS_PARSE = 3,
  SCP_STATUS_CAPACITY = 4,
  SCP_STATUS_BUDGET = 5,
  SCP_STATUS_PANIC = 6,
} ScpStatus;

// Pauli-expectation backend used by [`scp_simulate`].
typedef enum ScpBackend {
  SCP_BACKEND_EXACT = 0,
  SCP_BACKEND_CT_ECS = 1,
  SCP_BACKEND_CLIFFORD = 2,
  SCP_BACKEND_COMMUTING = 3,
} ScpBackend;

// Opaque circuit handle.
typedef struct ScpCircuit ScpCircuit;

// Opaque post-processing function handle.
typedef struct ScpFunction ScpFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL if none.
//
// The pointer stays valid until the next failing call on the same thread.
const char *scp_last_error_message(void);

// Parses a circuit from its text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum ScpStatus scp_circuit_parse(const char *text, struct ScpCircuit **out);

// Releases a circuit handle. NULL is ignored.
//
// # Safety
// `c` must come from [`scp_circuit_parse`] and not be used afterwards.
void scp_circuit_free(struct ScpCircuit *c);

// Qubit count of a circuit, or 0 for NULL.
//
// # Safety
// `c` must be NULL or a live handle.
size_t scp_circuit_num_qubits(const struct ScpCircuit *c);

// Measured-qubit count of a circuit, or 0 for NULL.
//
// # Safety
// `c` must be NULL or a live handle.
size_t scp_circuit_num_measured(const struct ScpCircuit *c);

// Parses a post-processing function from its text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum ScpStatus scp_function_parse(const char *text, struct ScpFunction **out);

// Releases a function handle. NULL is ignored.
//
// # Safety
// `f` must come from [`scp_function_parse`] and not be used afterwards.
void scp_function_free(struct ScpFunction *f);

// Exact acceptance probability from the statevector oracle.
//
// # Safety
// `c` and `f` must be live handles and `out` a valid pointer.
enum ScpStatus scp_acceptance_exact(const struct ScpCircuit *c,
                                    const struct ScpFunction *f,
                                    double *out);

// Exact `<Z(s)>` on the measured qubits; `s` is a bit string such as `"101"`.
//
// # Safety
// `c` must be a live handle, `s` a NUL-terminated string and `out` a valid pointer.
enum ScpStatus scp_pauli_expectation_exact(const struct ScpCircuit *c, const char *s, double *out);

// Estimates the acceptance probability to within `1/(2 p_target)` with
// probability at least `1 - delta`.
//
// # Safety
// `c` and `f` must be live handles and `out` a valid pointer.
enum ScpStatus scp_simulate(const struct ScpCircuit *c,
                            const struct ScpFunction *f,
                            enum ScpBackend backend,
                            uint64_t p_target,
                            double delta,
                            uint64_t seed,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCPSIM_H */
