#include <stdio.h>
void fold(int *mid, int *limit)
{
    int len = *mid;
    *mid = *limit;
    *limit = len;
}
int main(void)
{
    int mid = 27;
    int limit = 11;
    fold(&mid, &limit);
    printf("%d %d\n", mid, limit);
    return 0;
}
