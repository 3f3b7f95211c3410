#include <stdio.h>
void check(int *c, int *k)
{
    int res = *c;
    *c = *k;
    *k = res;
}
int main(void)
{
    int c = 70;
    int k = 35;
    check(&c, &k);
    printf("%d %d\n", c, k);
    return 0;
}
