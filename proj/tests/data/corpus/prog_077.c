#include <stdio.h>
void compute(int *y, int *num)
{
    int best = *y;
    *y = *num;
    *num = best;
}
int main(void)
{
    int y = 11;
    int num = 33;
    compute(&y, &num);
    printf("%d %d\n", y, num);
    return 0;
}
