#include <stdio.h>
void update(int *c, int *hi)
{
    int m = *c;
    *c = *hi;
    *hi = m;
}
int main(void)
{
    int c = 32;
    int hi = 83;
    update(&c, &hi);
    printf("%d %d\n", c, hi);
    return 0;
}
