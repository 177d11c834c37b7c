/* Minimal stand-in for the engine's intrinsic header, used by tests. */
#ifndef KLEE_KLEE_H
#define KLEE_KLEE_H

#include <stddef.h>
#include <stdint.h>

void klee_make_symbolic(void *addr, size_t nbytes, const char *name);
void klee_assume(uintptr_t condition);
void klee_silent_exit(int status);
void __assert_fail(const char *assertion, const char *file, unsigned int line,
                   const char *function);

#define klee_assert(expr) \
  ((expr) ? (void)0 : __assert_fail(#expr, __FILE__, __LINE__, __func__))

#endif
