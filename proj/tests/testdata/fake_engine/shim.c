/* Test double for a symbolic engine: forks once per value of the single
 * symbolic scalar in [0, FAKE_ENGINE_BOUND] and reports the first failure
 * per assertion line in the engine's output layout. */
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/wait.h>
#include <unistd.h>

static uint64_t g_value;
static int g_symbols;
static const char *g_out;

static void put_u32(FILE *f, uint32_t v) {
  unsigned char b[4] = {v >> 24, v >> 16, v >> 8, v};
  fwrite(b, 1, 4, f);
}

void klee_make_symbolic(void *addr, size_t nbytes, const char *name) {
  if (g_symbols++ > 0) {
    fprintf(stderr, "fake engine supports one symbolic object\n");
    _exit(5);
  }
  char path[4096];
  snprintf(path, sizeof path, "%s/pending.ktest", g_out);
  FILE *f = fopen(path, "wb");
  fwrite("KTEST", 1, 5, f);
  put_u32(f, 3);
  put_u32(f, 0);
  put_u32(f, 0);
  put_u32(f, 0);
  put_u32(f, 1);
  put_u32(f, (uint32_t)strlen(name));
  fwrite(name, 1, strlen(name), f);
  put_u32(f, (uint32_t)nbytes);
  for (size_t i = 0; i < nbytes; ++i) {
    unsigned char b = i < 8 ? (unsigned char)(g_value >> (8 * i)) : 0;
    fputc(b, f);
  }
  fclose(f);
  /* Byte loop: harnesses may define their own memcpy. */
  unsigned char *dst = addr;
  for (size_t i = 0; i < nbytes; ++i) dst[i] = i < 8 ? (unsigned char)(g_value >> (8 * i)) : 0;
}

void klee_silent_exit(int status) {
  (void)status;
  _exit(0);
}

void klee_assume(uintptr_t condition) {
  if (!condition) _exit(3);
}

void __assert_fail(const char *assertion, const char *file, unsigned int line,
                   const char *function) {
  (void)function;
  char path[4096];
  snprintf(path, sizeof path, "%s/pending.err", g_out);
  FILE *f = fopen(path, "w");
  fprintf(f, "Error: ASSERTION FAIL: %s\nFile: %s\nLine: %u\n", assertion, file, line);
  fclose(f);
  _exit(4);
}

__attribute__((constructor)) static void drive(void) {
  g_out = getenv("FAKE_ENGINE_OUT");
  const char *bound_env = getenv("FAKE_ENGINE_BOUND");
  uint64_t bound = bound_env ? strtoull(bound_env, NULL, 10) : 4096;
  unsigned seen[64];
  int nseen = 0;
  int tests = 0;
  char path[4096], dst[4096];
  snprintf(path, sizeof path, "%s/messages.txt", g_out);
  FILE *messages = fopen(path, "w");
  for (uint64_t v = 0; v <= bound; ++v) {
    pid_t pid = fork();
    if (pid == 0) {
      g_value = v;
      return; /* run main */
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) == 5) exit(2);
    if (WEXITSTATUS(status) != 4) continue;
    snprintf(path, sizeof path, "%s/pending.err", g_out);
    FILE *err = fopen(path, "r");
    char text[4096] = {0};
    fread(text, 1, sizeof text - 1, err);
    fclose(err);
    const char *l = strstr(text, "Line: ");
    unsigned line = l ? (unsigned)atoi(l + 6) : 0;
    int dup = 0;
    for (int i = 0; i < nseen; ++i) dup |= seen[i] == line;
    if (dup || nseen == 64) continue;
    seen[nseen++] = line;
    ++tests;
    snprintf(dst, sizeof dst, "%s/test%06d.assert.err", g_out, tests);
    rename(path, dst);
    snprintf(path, sizeof path, "%s/pending.ktest", g_out);
    snprintf(dst, sizeof dst, "%s/test%06d.ktest", g_out, tests);
    rename(path, dst);
    char *nl = strchr(text, '\n');
    if (nl) *nl = 0;
    fprintf(messages, "KLEE: ERROR: harness.c:%u: ASSERTION FAIL: %s\n", line, text + 23);
  }
  fclose(messages);
  snprintf(path, sizeof path, "%s/pending.ktest", g_out);
  unlink(path);
  snprintf(path, sizeof path, "%s/pending.err", g_out);
  unlink(path);
  exit(0);
}
