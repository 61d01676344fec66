#include <rivet/rivet.h>
#include <stdio.h>

int main(void) {
  rivet_config* c = NULL;
  rivet_status s = rivet_config_new(&c);
  if (s != RIVET_OK) return 1;
  s = rivet_config_set(c, "run.experiment", "toy-global");
  if (s == RIVET_OK) s = rivet_config_validate(c);
  rivet_config_free(c);
  if (s != RIVET_OK) {
    fprintf(stderr, "%s\n", rivet_last_error());
    return 1;
  }
  printf("rivet %s\n", rivet_version());
  return 0;
}
